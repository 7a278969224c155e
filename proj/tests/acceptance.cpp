// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each criterion pins its tolerances in code and checks its
// runtime budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dsd/cli.hpp"
#include "dsd/complexity.hpp"
#include "dsd/evalstore.hpp"
#include "dsd/netspec.hpp"
#include "dsd/popstats.hpp"
#include "dsd/quantlin.hpp"
#include "dsd/rng.hpp"
#include "dsd/sampler.hpp"

namespace fs = std::filesystem;
using namespace dsd;

namespace {

struct Checker {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    detail += (detail.empty() ? "" : "; ") + what;
  }
};

using Criterion = void (*)(Checker&);

int g_failures = 0;

void run_criterion(int id, const std::string& label, double time_limit_s, Criterion fn) {
  Checker c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(secs < time_limit_s,
           "runtime " + std::to_string(secs) + "s over limit " + std::to_string(time_limit_s) + "s");
  if (!c.ok) ++g_failures;
  std::ostringstream line;
  line << (c.ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << label << " ("
       << std::fixed << std::setprecision(2) << secs << "s)";
  if (!c.detail.empty()) line << " -- " << c.detail;
  std::cout << line.str() << std::endl;
}

// ---------------------------------------------------------------------------
// 1. Complexity oracle: ResNet-50 as a structural spec.

void criterion_complexity_oracle(Checker& c) {
  const auto spec = netspec::resnet50_spec();
  const auto cx = complexity::network_metrics(spec);

  c.expect(std::fabs(cx.flops / 4.1e9 - 1.0) <= 0.02,
           "flops " + std::to_string(cx.flops) + " not within 2% of 4.1e9");
  c.expect(std::fabs(cx.acts / 11.1e6 - 1.0) <= 0.02,
           "acts " + std::to_string(cx.acts) + " not within 2% of 11.1e6");

  // Independent per-layer parameter count: sum k^2 * w_in * w_out over every
  // conv, written out layer by layer, plus the head.
  double oracle = 7.0 * 7 * 3 * 64;  // stem conv
  const int depths[4] = {3, 4, 6, 3};
  const int widths[4] = {256, 512, 1024, 2048};
  const int inners[4] = {64, 128, 256, 512};
  int w_in = 64;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < depths[i]; ++j) {
      const int win = j == 0 ? w_in : widths[i];
      oracle += 1.0 * win * inners[i];                 // 1x1 reduce
      oracle += 9.0 * inners[i] * inners[i];           // 3x3 full conv
      oracle += 1.0 * inners[i] * widths[i];           // 1x1 expand
      if (j == 0) oracle += 1.0 * win * widths[i];     // residual projection
    }
    w_in = widths[i];
  }
  oracle += 2048.0 * 1000;  // head
  c.expect(cx.params == oracle, "params " + std::to_string(cx.params) + " != oracle " +
                                    std::to_string(oracle));
}

// ---------------------------------------------------------------------------
// 2. Design-space sizes against the printed summary values.

void criterion_design_space_sizes(Checker& c) {
  const std::pair<const char*, double> rows[] = {
      {"anynetx-a", 1.8e18}, {"anynetx-b", 6.8e16}, {"anynetx-c", 3.2e14},
      {"anynetx-d", 1.3e13}, {"anynetx-e", 5.5e11}, {"regnet", 3.0e8},
  };
  for (const auto& [name, printed] : rows) {
    const double size = sampler::design_space_size(sampler::preset(name));
    // The printed values carry two significant figures; require rounding
    // equality at that precision for every row, and the 2% bound wherever
    // an exact formula value sits inside it (all but anynetx-a, whose exact
    // value 1.8468e18 is 2.6% from the printed 1.8e18).
    const double mag = std::pow(10.0, std::floor(std::log10(size)) - 1);
    const bool rounds = std::fabs(std::round(size / mag) * mag - printed) <= 1e-6 * printed;
    c.expect(rounds, std::string(name) + " size " + std::to_string(size) +
                         " does not round to " + std::to_string(printed));
    if (std::string(name) != "anynetx-a")
      c.expect(std::fabs(size / printed - 1.0) <= 0.02,
               std::string(name) + " deviates more than 2%");
  }
}

// ---------------------------------------------------------------------------
// 3. Quantized-linear roundtrip for 1000 grid-aligned generators.

void criterion_quantlin_roundtrip(Checker& c) {
  const auto& grid = quantlin::FitGrid::standard();
  std::vector<double> w0s, was;
  std::vector<int> wms;
  for (double v : grid.w0_values)
    if (v < 256) w0s.push_back(v);
  for (double v : grid.wa_values)
    if (v < 256) was.push_back(v);
  for (int h : grid.wm_hundredths)
    if (h >= 150) wms.push_back(h);

  rng::SplitMix64 g{2025};
  int done = 0, exact = 0, regenerated = 0;
  while (done < 1000) {
    const int d = 1 + static_cast<int>(rng::below(g, 63));
    const double w0 = w0s[rng::below(g, w0s.size())];
    const double wa = was[rng::below(g, was.size())];
    const double wm = wms[rng::below(g, wms.size())] / 100.0;
    const auto profile = quantlin::gen_block_widths(d, w0, wa, wm);
    const auto stages = quantlin::to_stages(profile, 0, 4);
    if (!stages) continue;  // the stated stage-count rejection
    ++done;
    const auto expanded = quantlin::expand_stages(*stages);
    const auto fit = quantlin::fit_linear(expanded);
    if (fit.e_fit == 0.0) ++exact;
    const auto regen =
        quantlin::gen_block_widths(static_cast<int>(expanded.size()), fit.w0, fit.wa, fit.wm);
    if (regen.w == expanded) ++regenerated;
  }
  c.expect(exact == 1000, std::to_string(1000 - exact) + " fits with e_fit != 0");
  c.expect(regenerated == 1000, std::to_string(1000 - regenerated) + " regenerations differ");
}

// ---------------------------------------------------------------------------
// 4. Width-rule hand cases against an independent brute-force evaluation.

std::vector<double> brute_force_widths(int d, double w0, double wa, double wm) {
  // Independent route: scan integer exponents for the best log-space match,
  // larger exponent on ties.
  std::vector<double> out;
  for (int j = 0; j < d; ++j) {
    const double u = w0 + wa * j;
    int best_k = 0;
    double best = 1e300;
    for (int k = 0; k <= 300; ++k) {
      const double err = std::fabs(std::log(u / (w0 * std::pow(wm, k))));
      if (err < best - 1e-12) {
        best = err;
        best_k = k;
      } else if (err <= best + 1e-12) {
        best_k = k;  // ties to the larger exponent, as round-half-away does
      }
    }
    out.push_back(w0 * std::pow(wm, best_k));
  }
  return out;
}

void criterion_width_rule_hand_cases(Checker& c) {
  const auto a = quantlin::gen_block_widths(4, 48, 48, 2);
  c.expect(a.w == std::vector<double>{48, 96, 192, 192}, "(4,48,48,2) widths wrong");
  const auto oracle_a = brute_force_widths(4, 48, 48, 2);
  c.expect(a.w == oracle_a, "(4,48,48,2) disagrees with brute force");

  const auto b = quantlin::gen_block_widths(3, 24, 36, 2.5);
  c.expect(b.w == std::vector<double>{24, 60, 150}, "(3,24,36,2.5) widths wrong");
  const auto oracle_b = brute_force_widths(3, 24, 36, 2.5);
  for (int j = 0; j < 3; ++j)
    c.expect(std::fabs(b.w[j] - oracle_b[j]) < 1e-9, "(3,24,36,2.5) disagrees with brute force");
}

// ---------------------------------------------------------------------------
// 5. EDF properties over a thousand random error vectors.

void criterion_edf_properties(Checker& c) {
  rng::SplitMix64 g{55};
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(rng::below(g, 300));
    std::vector<double> errors(n);
    for (auto& e : errors) e = rng::u01(g);
    if (rep % 5 == 0) errors[rng::below(g, n)] = errors[0];  // inject ties

    const popstats::Edf F(errors);
    c.expect(F(F.min_error()) == 0.0, "F(min) != 0");
    c.expect(F(F.max_error() + 1e-9) == 1.0, "F(max+eps) != 1");

    double prev = -1;
    for (double e = 0; e <= 1.0001; e += 0.04) {
      const double v = F(e);
      c.expect(v >= prev, "F not non-decreasing");
      prev = v;
    }

    const auto& sorted = F.sorted();
    double integral = 0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
      integral += (sorted[i + 1] - sorted[i]) * (1.0 - double(i + 1) / n);
    const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) / n;
    c.expect(std::fabs(F.min_error() + integral - mean) <= 1e-9, "integral identity broken");
    if (!c.ok) return;
  }
}

// ---------------------------------------------------------------------------
// 6. Bootstrap procedure against a brute-force reimplementation.

popstats::BootstrapResult bootstrap_brute_force(std::vector<std::pair<double, double>> pairs,
                                                double frac, int reps, double ci,
                                                std::uint64_t seed) {
  // The footnote procedure plus the documented seeding, written out again.
  std::sort(pairs.begin(), pairs.end());
  const std::size_t n = pairs.size();
  const std::size_t m = static_cast<std::size_t>(std::ceil(frac * n));
  std::vector<double> xs;
  xs.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    rng::SplitMix64 g{rng::derive_seed(seed, rep)};
    double be = 1e300, bx = 0;
    for (std::size_t t = 0; t < m; ++t) {
      const auto& p = pairs[rng::below(g, n)];
      if (p.second < be || (p.second == be && p.first < bx)) {
        be = p.second;
        bx = p.first;
      }
    }
    xs.push_back(bx);
  }
  std::sort(xs.begin(), xs.end());
  auto q = [&](double v) {
    const double h = v * (xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] + (h - lo) * (xs[lo + 1] - xs[lo]);
  };
  return {q((1 - ci) / 2), q(1 - (1 - ci) / 2), q(0.5), reps, frac};
}

void criterion_bootstrap(Checker& c) {
  // Degenerate input: point interval.
  std::vector<std::pair<double, double>> same;
  for (int i = 0; i < 64; ++i) same.push_back({3.25, i / 64.0});
  const auto point = popstats::bootstrap_best(same);
  c.expect(point.ci_low == 3.25 && point.ci_high == 3.25 && point.median == 3.25,
           "degenerate input did not give a point CI");
  c.expect(point.frac == 0.25 && point.reps == 10000, "defaults drifted");

  // Population-scale synthetic: error strictly increasing in x over 1..100,
  // five samples per x value.
  std::vector<std::pair<double, double>> pairs;
  for (int x = 1; x <= 100; ++x)
    for (int copy = 0; copy < 5; ++copy)
      pairs.push_back({double(x), x / 100.0 + copy * 1e-6});
  const auto impl = popstats::bootstrap_best(pairs, 0.25, 10000, 0.95, 31);
  const auto brute = bootstrap_brute_force(pairs, 0.25, 10000, 0.95, 31);
  c.expect(impl.ci_low == brute.ci_low && impl.ci_high == brute.ci_high &&
               impl.median == brute.median,
           "bootstrap disagrees with the brute-force reimplementation");

  std::vector<double> xs;
  for (const auto& p : pairs) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  const double p10 = popstats::quantile_sorted(xs, 0.10);
  c.expect(impl.ci_high <= p10, "CI upper " + std::to_string(impl.ci_high) +
                                    " above the 10th percentile " + std::to_string(p10));
}

// ---------------------------------------------------------------------------
// 7. Sampler contracts: window, cumulative predicates, worker determinism.

std::string serialize_records(const std::vector<popstats::PopulationSample>& records) {
  evalstore::PopulationFile pop;
  pop.records = records;
  std::ostringstream out;
  evalstore::write_population(pop, out);
  return out.str();
}

void criterion_sampler_contracts(Checker& c) {
  sampler::SamplerConfig cfg;
  cfg.space = sampler::preset("anynetx-a");
  cfg.population_size = 500;
  cfg.flops_lo = 360e6;
  cfg.flops_hi = 400e6;
  cfg.master_seed = 7;
  const auto population = sampler::sample_population(cfg);
  int violations = 0;
  for (const auto& s : population)
    if (s.complexity.flops < cfg.flops_lo || s.complexity.flops > cfg.flops_hi) ++violations;
  c.expect(violations == 0, std::to_string(violations) + " flop-window violations");

  sampler::SamplerConfig ecfg = cfg;
  ecfg.space = sampler::preset("anynetx-e");
  ecfg.master_seed = 8;
  const auto e_population = sampler::sample_population(ecfg);
  int predicate_failures = 0;
  for (const auto& s : e_population)
    for (const char* name : {"anynetx-b", "anynetx-c", "anynetx-d", "anynetx-e"})
      if (!netspec::check_constraints(s.spec, sampler::preset(name)).pass())
        ++predicate_failures;
  c.expect(predicate_failures == 0,
           std::to_string(predicate_failures) + " cumulative predicate failures");

  sampler::SamplerConfig wcfg = cfg;
  wcfg.population_size = 120;
  wcfg.workers = 1;
  const auto one = serialize_records(sampler::sample_population(wcfg));
  wcfg.workers = 4;
  const auto four = serialize_records(sampler::sample_population(wcfg));
  wcfg.workers = 8;
  const auto eight = serialize_records(sampler::sample_population(wcfg));
  c.expect(one == four && one == eight, "populations differ across worker counts");
}

// ---------------------------------------------------------------------------
// 8. Constrained RegNet restrictions over ten thousand samples.

void criterion_constrained_regnet(Checker& c) {
  const auto def = sampler::preset("regnetx-constrained");
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto draw = sampler::sample_regnet(def, seed);
    int total_depth = 0;
    bool unit_b = draw.params.bottleneck == 1.0;
    for (const auto& st : draw.spec.stages) {
      total_depth += st.depth;
      unit_b = unit_b && st.bottleneck == 1.0;
    }
    if (!unit_b || draw.params.wm < 2.0 || total_depth < 12 || total_depth > 28) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " constraint violations");
}

// ---------------------------------------------------------------------------
// 9. Random-search efficiency properties.

void criterion_random_search(Checker& c) {
  sampler::SamplerConfig cfg;
  cfg.space = sampler::preset("anynetx-a");
  cfg.population_size = 300;
  cfg.master_seed = 5;
  evalstore::PopulationFile pop;
  pop.records = sampler::sample_population(cfg);
  evalstore::apply_surrogate(pop, 13);
  std::vector<double> errors;
  for (const auto& r : pop.records) errors.push_back(*r.error);
  const double min_error = *std::min_element(errors.begin(), errors.end());

  const std::vector<int> budgets{1, 2, 4, 8, 16, 32, 64, 128, 300};
  const auto eff = popstats::random_search_efficiency(errors, budgets, 2000, 17);
  for (std::size_t i = 1; i < eff.size(); ++i)
    c.expect(eff[i].expected_best <= eff[i - 1].expected_best, "efficiency curve not monotone");
  c.expect(eff.back().expected_best == min_error, "full budget does not return the exact min");

  // The analytic case averages over uniform populations as well as draws, so
  // the Monte Carlo resamples both; the standard error is taken across the
  // per-population estimates.
  const int pops = 24;
  std::vector<double> means;
  const std::vector<int> b32{32};
  for (int p = 0; p < pops; ++p) {
    rng::SplitMix64 g{rng::derive_seed(23, p)};
    std::vector<double> uniform(10000);
    for (auto& e : uniform) e = rng::u01(g);
    means.push_back(popstats::random_search_efficiency(uniform, b32, 400, 29 + p)[0]
                        .expected_best);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / pops;
  double var = 0;
  for (double m : means) var += (m - mean) * (m - mean);
  const double se = std::sqrt(var / (pops - 1) / pops);
  c.expect(std::fabs(mean - 1.0 / 33) <= 2 * se,
           "E[min of 32 uniforms] " + std::to_string(mean) +
               " outside 2 MC standard errors of 1/33 (se " + std::to_string(se) + ")");
}

// ---------------------------------------------------------------------------
// 10. End-to-end qualitative regression through the CLI.

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DSD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_end_to_end(Checker& c) {
  const fs::path dir = fs::temp_directory_path() / "dsd-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::string window = "360e6:400e6";
  struct Space {
    const char* preset;
    const char* file;
  };
  const Space spaces[] = {{"regnet", "regnet.jsonl"},
                          {"anynetx-e", "xe.jsonl"},
                          {"anynetx-a", "xa.jsonl"}};
  for (const auto& s : spaces) {
    const auto path = (dir / s.file).string();
    c.expect(run_cli("sample --space " + std::string(s.preset) + " --n 500 --flops " + window +
                     " --seed 21 --workers 8 --out " + path) == 0,
             std::string("sample failed for ") + s.preset);
    c.expect(run_cli("surrogate --pop " + path + " --seed 9") == 0,
             std::string("surrogate failed for ") + s.preset);
  }
  if (!c.ok) return;

  const auto out_dir = (dir / "analysis").string();
  c.expect(run_cli("analyze --pop " + (dir / "regnet.jsonl").string() + " --compare " +
                   (dir / "xe.jsonl").string() + " " + (dir / "xa.jsonl").string() + " --out " +
                   out_dir) == 0,
           "analyze --compare failed");

  // The compare report must certify the pointwise ordering.
  std::ifstream ordering(fs::path(out_dir) / "ordering.csv");
  c.expect(ordering.good(), "ordering.csv missing");
  bool regnet_ge_xe = false, xe_ge_xa = false;
  std::string line;
  while (std::getline(ordering, line)) {
    if (line.rfind("regnet,anynetx-e", 0) == 0 && line.back() == '1') regnet_ge_xe = true;
    if (line.rfind("anynetx-e,anynetx-a", 0) == 0 && line.back() == '1') xe_ge_xa = true;
  }
  c.expect(regnet_ge_xe, "report does not show EDF(regnet) >= EDF(anynetx-e) pointwise");
  c.expect(xe_ge_xa, "report does not show EDF(anynetx-e) >= EDF(anynetx-a) pointwise");

  // Independent check of the same ordering straight from the populations.
  std::vector<std::vector<double>> errs;
  std::vector<double> pooled;
  for (const auto& s : spaces) {
    const auto pop = evalstore::read_population_file((dir / s.file).string());
    std::vector<double> e;
    for (const auto& r : pop.records) {
      c.expect(r.source == popstats::ErrorSource::Surrogate, "unexpected error source");
      e.push_back(*r.error);
    }
    pooled.insert(pooled.end(), e.begin(), e.end());
    errs.push_back(std::move(e));
  }
  std::sort(pooled.begin(), pooled.end());
  const double lo = popstats::quantile_sorted(pooled, 0.05);
  const double hi = popstats::quantile_sorted(pooled, 0.95);
  const popstats::Edf Fr(errs[0]), Fe(errs[1]), Fa(errs[2]);
  int ordering_breaks = 0;
  for (double e : pooled) {
    if (e < lo || e > hi) continue;
    for (double probe : {e, std::nextafter(e, 2.0)}) {
      if (Fr(probe) < Fe(probe) || Fe(probe) < Fa(probe)) ++ordering_breaks;
    }
  }
  c.expect(ordering_breaks == 0,
           std::to_string(ordering_breaks) + " pointwise ordering breaks in [q5, q95]");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  std::cout << "acceptance suite (tool " << cli::kToolVersion << ")\n";
  run_criterion(1, "complexity oracle (ResNet-50 flops/acts within 2%, params exact)", 1.0,
                criterion_complexity_oracle);
  run_criterion(2, "design-space sizes reproduce the printed summary", 1.0,
                criterion_design_space_sizes);
  run_criterion(3, "quantized-linear roundtrip, 1000 grid-aligned generators", 30.0,
                criterion_quantlin_roundtrip);
  run_criterion(4, "width-rule hand cases vs brute force", 1.0,
                criterion_width_rule_hand_cases);
  run_criterion(5, "EDF properties and integral identity (1e3 vectors)", 10.0,
                criterion_edf_properties);
  run_criterion(6, "empirical bootstrap vs brute-force reimplementation", 20.0,
                criterion_bootstrap);
  run_criterion(7, "sampler contracts: window, predicates, worker determinism", 60.0,
                criterion_sampler_contracts);
  run_criterion(8, "constrained regnet restrictions over 1e4 samples", 60.0,
                criterion_constrained_regnet);
  run_criterion(9, "random-search efficiency properties", 20.0, criterion_random_search);
  run_criterion(10, "end-to-end EDF ordering through the CLI", 120.0, criterion_end_to_end);

  if (g_failures == 0) {
    std::cout << "all criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria failed\n";
  return 1;
}
