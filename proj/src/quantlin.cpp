#include "dsd/quantlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsd/netspec.hpp"

namespace dsd::quantlin {

double quantized_width(double w0, double wm, int k) {
  return w0 * std::pow(wm, static_cast<double>(k));
}

BlockWidthProfile gen_block_widths(int d, double w0, double wa, double wm) {
  if (d < 1) throw std::invalid_argument("depth must be >= 1");
  if (w0 <= 0) throw std::invalid_argument("w0 must be positive");
  if (wa < 0) throw std::invalid_argument("wa must be non-negative");
  if (wm <= 1) throw std::invalid_argument("wm must be > 1");

  BlockWidthProfile p;
  p.w0 = w0;
  p.wa = wa;
  p.wm = wm;
  p.u.reserve(d);
  p.s.reserve(d);
  p.k.reserve(d);
  p.w.reserve(d);
  const double inv_log_wm = 1.0 / std::log(wm);
  for (int j = 0; j < d; ++j) {
    const double u = w0 + wa * j;
    const double s = std::log(u / w0) * inv_log_wm;
    const int k = static_cast<int>(std::llround(s));  // half away from zero
    p.u.push_back(u);
    p.s.push_back(s);
    p.k.push_back(k);
    p.w.push_back(quantized_width(w0, wm, k));
  }
  return p;
}

std::optional<std::vector<StageDims>> to_stages(const BlockWidthProfile& profile, int round_to,
                                                int expected_stages) {
  if (profile.w.empty()) throw std::invalid_argument("empty width profile");
  if (profile.k.size() != profile.w.size())
    throw std::invalid_argument("width profile has mismatched exponents");
  std::vector<StageDims> stages;
  for (std::size_t j = 0; j < profile.k.size(); ++j) {
    if (!stages.empty() && profile.k[j] == profile.k[j - 1]) {
      ++stages.back().depth;
    } else {
      stages.push_back({profile.w[j], 1});
    }
  }
  if (expected_stages > 0 && static_cast<int>(stages.size()) != expected_stages)
    return std::nullopt;
  if (round_to > 0)
    for (auto& st : stages)
      st.width = netspec::round_to_multiple(st.width, round_to);
  return stages;
}

std::vector<double> expand_stages(const std::vector<StageDims>& stages) {
  std::vector<double> out;
  for (const auto& st : stages)
    for (int j = 0; j < st.depth; ++j) out.push_back(st.width);
  return out;
}

double efit(double w0, double wa, double wm, std::span<const double> observed) {
  if (observed.empty()) throw std::invalid_argument("observed widths must be non-empty");
  for (double v : observed)
    if (!(v > 0)) throw std::invalid_argument("observed widths must be positive");
  const BlockWidthProfile p = gen_block_widths(static_cast<int>(observed.size()), w0, wa, wm);
  double sum = 0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    if (p.w[j] != observed[j]) sum += std::fabs(std::log(p.w[j] / observed[j]));
  }
  return sum / static_cast<double>(observed.size());
}

const FitGrid& FitGrid::standard() {
  static const FitGrid grid = [] {
    FitGrid g;
    for (int w = 8; w <= 256; w += 8) g.w0_values.push_back(w);
    for (int a = 1; a <= 32; ++a) g.wa_values.push_back(a);
    for (int a = 36; a <= 256; a += 4) g.wa_values.push_back(a);
    for (int h = 105; h <= 300; h += 5) g.wm_hundredths.push_back(h);
    return g;
  }();
  return grid;
}

LinearFit fit_linear(std::span<const double> observed, const FitGrid& grid) {
  if (observed.empty()) throw std::invalid_argument("observed widths must be non-empty");
  for (double v : observed)
    if (!(v > 0)) throw std::invalid_argument("observed widths must be positive");
  if (grid.w0_values.empty() || grid.wa_values.empty() || grid.wm_hundredths.empty())
    throw std::invalid_argument("empty fit grid");

  const int d = static_cast<int>(observed.size());
  const double n = static_cast<double>(d);

  LinearFit best;
  double best_sum = std::numeric_limits<double>::infinity();

  // Power tables per wm, grown on demand.
  std::vector<double> wm_values;
  wm_values.reserve(grid.wm_hundredths.size());
  for (int h : grid.wm_hundredths) wm_values.push_back(h / 100.0);
  std::vector<std::vector<double>> powers(wm_values.size());

  // log(u_j / w0), hoisted per (w0, wa). The expression must stay identical
  // to gen_block_widths so grid-aligned fits reproduce widths bitwise.
  std::vector<double> log_ratio(d);
  for (std::size_t i0 = 0; i0 < grid.w0_values.size(); ++i0) {
    const double w0 = grid.w0_values[i0];
    // The j=0 term is |log(w0/obs_0)| for every (wa, wm); prune on it.
    const double base0 = (w0 == observed[0]) ? 0.0 : std::fabs(std::log(w0 / observed[0]));
    if (base0 >= best_sum) continue;

    for (std::size_t ia = 0; ia < grid.wa_values.size(); ++ia) {
      const double wa = grid.wa_values[ia];
      for (int j = 0; j < d; ++j) log_ratio[j] = std::log((w0 + wa * j) / w0);

      for (std::size_t im = 0; im < wm_values.size(); ++im) {
        const double wm = wm_values[im];
        const double inv_log_wm = 1.0 / std::log(wm);
        auto& pw = powers[im];

        double sum = base0;
        bool aborted = false;
        for (int j = 1; j < d; ++j) {
          const double s = log_ratio[j] * inv_log_wm;
          const int k = static_cast<int>(std::llround(s));
          while (static_cast<int>(pw.size()) <= k)
            pw.push_back(std::pow(wm, static_cast<double>(pw.size())));
          const double pred = w0 * pw[k];
          if (pred != observed[j]) sum += std::fabs(std::log(pred / observed[j]));
          if (sum >= best_sum) {
            aborted = true;
            break;
          }
        }
        if (aborted || sum >= best_sum) continue;
        best_sum = sum;
        best = {w0, wa, wm, sum / n};
        if (best_sum == 0.0) return best;  // nothing can beat an exact fit
      }
    }
  }
  return best;
}

}  // namespace dsd::quantlin
