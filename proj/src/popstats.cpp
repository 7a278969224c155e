#include "dsd/popstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "dsd/rng.hpp"

namespace dsd::popstats {

std::string to_string(ErrorSource s) {
  switch (s) {
    case ErrorSource::None: return "none";
    case ErrorSource::Ingested: return "ingested";
    case ErrorSource::Surrogate: return "surrogate";
  }
  throw std::logic_error("unknown error source");
}

ErrorSource error_source_from_string(const std::string& s) {
  if (s == "none") return ErrorSource::None;
  if (s == "ingested") return ErrorSource::Ingested;
  if (s == "surrogate") return ErrorSource::Surrogate;
  throw std::invalid_argument("unknown error source: " + s);
}

Edf::Edf(std::span<const double> errors) : sorted_(errors.begin(), errors.end()) {
  if (sorted_.empty()) throw std::invalid_argument("edf needs at least one error");
  std::sort(sorted_.begin(), sorted_.end());
}

double Edf::operator()(double e) const {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), e);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Edf::mean_error() const {
  return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) /
         static_cast<double>(sorted_.size());
}

Edf edf(std::span<const double> errors) { return Edf(errors); }

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  if (q <= 0) return sorted.front();
  if (q >= 1) return sorted.back();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BootstrapResult bootstrap_best(std::span<const std::pair<double, double>> pairs, double frac,
                               int reps, double ci, std::uint64_t seed) {
  if (pairs.size() < 2) throw std::invalid_argument("bootstrap needs at least 2 pairs");
  if (!(frac > 0 && frac <= 1)) throw std::invalid_argument("frac must be in (0, 1]");
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (!(ci > 0 && ci < 1)) throw std::invalid_argument("ci must be in (0, 1)");

  // Canonical order makes the result independent of storage order.
  std::vector<std::pair<double, double>> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end());

  const std::size_t n = sorted.size();
  const std::size_t m = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n)));

  std::vector<double> best_x(reps);
  for (int rep = 0; rep < reps; ++rep) {
    rng::SplitMix64 g{rng::derive_seed(seed, static_cast<std::uint64_t>(rep))};
    double min_e = std::numeric_limits<double>::infinity();
    double min_x = 0;
    for (std::size_t t = 0; t < m; ++t) {
      const auto& p = sorted[rng::below(g, n)];
      if (p.second < min_e || (p.second == min_e && p.first < min_x)) {
        min_e = p.second;
        min_x = p.first;
      }
    }
    best_x[rep] = min_x;
  }
  std::sort(best_x.begin(), best_x.end());

  const double tail = (1.0 - ci) / 2.0;
  BootstrapResult out;
  out.ci_low = quantile_sorted(best_x, tail);
  out.ci_high = quantile_sorted(best_x, 1.0 - tail);
  out.median = quantile_sorted(best_x, 0.5);
  out.reps = reps;
  out.frac = frac;
  return out;
}

std::vector<EfficiencyPoint> random_search_efficiency(std::span<const double> errors,
                                                      std::span<const int> budgets, int trials,
                                                      std::uint64_t seed) {
  if (errors.empty()) throw std::invalid_argument("empty error population");
  if (budgets.empty()) throw std::invalid_argument("no budgets");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const std::size_t n = errors.size();
  int max_budget = 0;
  for (int b : budgets) {
    if (b < 1 || static_cast<std::size_t>(b) > n)
      throw std::invalid_argument("budget outside [1, population size]");
    max_budget = std::max(max_budget, b);
  }

  std::vector<int> order(budgets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return budgets[a] < budgets[b]; });

  std::vector<double> sum(budgets.size(), 0.0), sumsq(budgets.size(), 0.0);
  std::vector<double> lo(budgets.size(), 0.0), hi(budgets.size(), 0.0);
  std::vector<std::size_t> idx(n);
  for (int t = 0; t < trials; ++t) {
    rng::SplitMix64 g{rng::derive_seed(seed, static_cast<std::uint64_t>(t))};
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first max_budget slots are a uniform draw
    // without replacement, shared by every budget of this trial.
    double running = std::numeric_limits<double>::infinity();
    std::size_t next_budget = 0;
    for (int i = 0; i < max_budget; ++i) {
      const std::size_t j = i + rng::below(g, n - i);
      std::swap(idx[i], idx[j]);
      running = std::min(running, errors[idx[i]]);
      while (next_budget < order.size() && budgets[order[next_budget]] == i + 1) {
        const std::size_t k = order[next_budget];
        sum[k] += running;
        sumsq[k] += running * running;
        lo[k] = t == 0 ? running : std::min(lo[k], running);
        hi[k] = t == 0 ? running : std::max(hi[k], running);
        ++next_budget;
      }
    }
  }

  std::vector<EfficiencyPoint> out(budgets.size());
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    // A budget whose trials all landed on one value (the full budget always
    // does) reports it exactly, free of accumulation rounding.
    const double mean = lo[k] == hi[k] ? lo[k] : sum[k] / trials;
    const double var = std::max(0.0, sumsq[k] / trials - mean * mean);
    out[k] = {budgets[k], mean, trials > 1 ? std::sqrt(var / trials) : 0.0};
  }
  return out;
}

namespace {

// Least squares over up to three columns via normal equations.
struct SmallLsq {
  int cols = 0;
  long double ata[3][3] = {};
  long double atb[3] = {};

  void add(const long double* row, double y) {
    for (int i = 0; i < cols; ++i) {
      for (int j = 0; j < cols; ++j) ata[i][j] += row[i] * row[j];
      atb[i] += row[i] * y;
    }
  }

  void solve(double* coeffs) {
    // A pivot that collapses relative to its own column's squared norm (the
    // untouched diagonal) signals rank deficiency.
    long double diag[3];
    for (int i = 0; i < cols; ++i) diag[i] = ata[i][i];
    for (int col = 0; col < cols; ++col) {
      int pivot = col;
      for (int r = col + 1; r < cols; ++r)
        if (fabsl(ata[r][col]) > fabsl(ata[pivot][col])) pivot = r;
      if (fabsl(ata[pivot][col]) <= diag[col] * 1e-12L)
        throw std::runtime_error("rank-deficient trend fit");
      if (pivot != col) {
        for (int j = 0; j < cols; ++j) std::swap(ata[pivot][j], ata[col][j]);
        std::swap(atb[pivot], atb[col]);
      }
      for (int r = 0; r < cols; ++r) {
        if (r == col) continue;
        const long double f = ata[r][col] / ata[col][col];
        for (int j = 0; j < cols; ++j) ata[r][j] -= f * ata[col][j];
        atb[r] -= f * atb[col];
      }
    }
    for (int i = 0; i < cols; ++i) coeffs[i] = static_cast<double>(atb[i] / ata[i][i]);
  }
};

void model_row(TrendModel model, bool intercept, double flops, long double* row, int& cols) {
  cols = 0;
  if (model == TrendModel::Linear || model == TrendModel::LinearSqrt) row[cols++] = flops;
  if (model == TrendModel::Sqrt || model == TrendModel::LinearSqrt)
    row[cols++] = std::sqrt(flops);
  if (intercept) row[cols++] = 1.0L;
}

}  // namespace

std::vector<FlopBin> log_flop_bins(double lo, double hi, int bins_per_decade) {
  if (!(lo > 0 && hi > lo)) throw std::invalid_argument("need 0 < lo < hi");
  if (bins_per_decade < 1) throw std::invalid_argument("bins_per_decade must be >= 1");
  const double step = std::log10(hi / lo) * bins_per_decade;
  const int nbins = std::max(1, static_cast<int>(std::ceil(step - 1e-12)));
  std::vector<FlopBin> bins(nbins);
  const double log_lo = std::log10(lo);
  const double width = std::log10(hi / lo) / nbins;
  for (int i = 0; i < nbins; ++i) {
    bins[i].lo = std::pow(10.0, log_lo + i * width);
    bins[i].hi = std::pow(10.0, log_lo + (i + 1) * width);
  }
  bins.front().lo = lo;
  bins.back().hi = hi;
  return bins;
}

TrendFitResult trend_fit(std::span<const TrendPoint> points, TrendModel model, bool frontier,
                         bool intercept) {
  std::vector<TrendPoint> used;
  if (frontier) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& p : points) {
      if (!p.error) throw std::invalid_argument("frontier fit needs per-point errors");
      lo = std::min(lo, p.flops);
      hi = std::max(hi, p.flops);
    }
    if (points.empty()) throw std::invalid_argument("no trend points");
    const auto bins = log_flop_bins(lo, std::max(hi, lo * (1 + 1e-9)));
    std::vector<int> best(bins.size(), -1);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t b = 0; b < bins.size(); ++b) {
        if (points[i].flops < bins[b].lo || points[i].flops > bins[b].hi) continue;
        if (best[b] < 0 || *points[i].error < *points[best[b]].error)
          best[b] = static_cast<int>(i);
        break;
      }
    }
    for (int b : best)
      if (b >= 0) used.push_back(points[b]);
  } else {
    used.assign(points.begin(), points.end());
  }

  int cols = 0;
  long double row[3];
  if (!used.empty()) model_row(model, intercept, used[0].flops, row, cols);
  if (static_cast<int>(used.size()) < std::max(cols, 1))
    throw std::invalid_argument("fewer points than coefficients");

  SmallLsq lsq;
  lsq.cols = cols;
  for (const auto& p : used) {
    model_row(model, intercept, p.flops, row, cols);
    lsq.add(row, p.y);
  }
  double coeffs[3] = {};
  lsq.solve(coeffs);

  TrendFitResult fit;
  fit.model = model;
  int at = 0;
  if (model == TrendModel::Linear || model == TrendModel::LinearSqrt) fit.a = coeffs[at++];
  if (model == TrendModel::Sqrt || model == TrendModel::LinearSqrt) fit.b = coeffs[at++];
  if (intercept) fit.c = coeffs[at++];
  fit.points_used = static_cast<int>(used.size());

  double sse = 0;
  for (const auto& p : used) {
    const double r = p.y - trend_eval(fit, p.flops);
    sse += r * r;
  }
  fit.rms_residual = std::sqrt(sse / static_cast<double>(used.size()));
  return fit;
}

double trend_eval(const TrendFitResult& fit, double flops) {
  return fit.a * flops + fit.b * std::sqrt(flops) + fit.c;
}

std::vector<ParamTrendBand> param_trends(std::span<const PopulationSample> population,
                                         const ParamExtractor& extractor,
                                         std::span<const FlopBin> bins, std::uint64_t seed) {
  std::vector<ParamTrendBand> out;
  out.reserve(bins.size());
  for (std::size_t b = 0; b < bins.size(); ++b) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& s : population) {
      if (!s.error) continue;
      if (s.complexity.flops < bins[b].lo || s.complexity.flops > bins[b].hi) continue;
      pairs.emplace_back(extractor(s), *s.error);
    }
    if (pairs.size() < 2)
      throw std::invalid_argument("flop bin " + std::to_string(b) +
                                  " has fewer than 2 complete samples");
    ParamTrendBand band;
    band.bin = bins[b];
    band.best_range = bootstrap_best(pairs, 0.25, 10000, 0.95, rng::derive_seed(seed, b));
    band.count = static_cast<int>(pairs.size());
    out.push_back(band);
  }
  return out;
}

double total_depth(const PopulationSample& s) {
  int d = 0;
  for (const auto& st : s.spec.stages) d += st.depth;
  return static_cast<double>(d);
}

double last_stage_width(const PopulationSample& s) {
  return s.spec.stages.empty() ? 0.0 : static_cast<double>(s.spec.stages.back().width);
}

}  // namespace dsd::popstats
