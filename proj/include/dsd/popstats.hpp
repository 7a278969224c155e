#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsd/complexity.hpp"
#include "dsd/netspec.hpp"

// Population-level statistics: error EDFs, the empirical bootstrap of
// best-model parameter ranges, random-search efficiency, and complexity
// trend fits.
namespace dsd::popstats {

enum class ErrorSource { None, Ingested, Surrogate };

std::string to_string(ErrorSource s);
ErrorSource error_source_from_string(const std::string& s);

// The unit of all statistics: a spec with its complexity, provenance, and
// (once trained or scored) its top-1 error fraction.
struct PopulationSample {
  std::string spec_hash;
  netspec::AnyNetSpec spec;
  std::optional<netspec::RegNetParams> regnet_params;
  complexity::ComplexityReport complexity;
  std::optional<double> error;
  ErrorSource source = ErrorSource::None;
  std::optional<int> epochs;
};

// F(e) = (1/n) sum 1[e_i < e]: the fraction of models with error strictly
// below e. Right-continuous complement conventions follow from the strict
// inequality.
class Edf {
 public:
  explicit Edf(std::span<const double> errors);

  double operator()(double e) const;
  double min_error() const { return sorted_.front(); }
  double max_error() const { return sorted_.back(); }
  double mean_error() const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

Edf edf(std::span<const double> errors);

struct BootstrapResult {
  double ci_low = 0;
  double ci_high = 0;
  double median = 0;
  int reps = 0;
  double frac = 0;
};

// The empirical bootstrap over (x, error) pairs: resample ceil(frac*n)
// pairs with replacement, keep the x of the min-error pair, repeat, and
// report the [2.5%, 97.5%] quantiles and median of the kept x values.
// Inputs are canonically sorted by (x, e) first, so the result only depends
// on the multiset of pairs and the seed. Rep r draws from
// SplitMix64{derive_seed(seed, r)}.
BootstrapResult bootstrap_best(std::span<const std::pair<double, double>> pairs,
                               double frac = 0.25, int reps = 10000, double ci = 0.95,
                               std::uint64_t seed = 0);

// Type-7 (linear interpolation) quantile of already-sorted values.
double quantile_sorted(std::span<const double> sorted, double q);

struct EfficiencyPoint {
  int budget = 0;
  double expected_best = 0;
  double std_error = 0;
};

// Monte Carlo estimate of E[min of n errors drawn without replacement] per
// budget. Each trial draws one prefix permutation and serves every budget
// from its running min, which makes the curve monotone by construction.
std::vector<EfficiencyPoint> random_search_efficiency(std::span<const double> errors,
                                                      std::span<const int> budgets, int trials,
                                                      std::uint64_t seed);

enum class TrendModel { Linear, Sqrt, LinearSqrt };

struct TrendPoint {
  double flops = 0;
  double y = 0;
  std::optional<double> error;  // needed only for frontier fits
};

struct TrendFitResult {
  TrendModel model = TrendModel::Linear;
  double a = 0;         // linear coefficient
  double b = 0;         // sqrt coefficient
  double c = 0;         // intercept (0 unless requested)
  double rms_residual = 0;
  int points_used = 0;
};

// Least squares of y = a*f (+ b*sqrt(f)) (+ c). With frontier set, only the
// lowest-error sample in each log-spaced flop bin (8 per decade) is fitted.
TrendFitResult trend_fit(std::span<const TrendPoint> points, TrendModel model,
                         bool frontier = false, bool intercept = false);

double trend_eval(const TrendFitResult& fit, double flops);

struct FlopBin {
  double lo = 0;
  double hi = 0;
};

// Log-spaced bins covering [lo, hi], bins_per_decade per factor of 10.
std::vector<FlopBin> log_flop_bins(double lo, double hi, int bins_per_decade = 8);

struct ParamTrendBand {
  FlopBin bin;
  BootstrapResult best_range;
  int count = 0;
};

using ParamExtractor = std::function<double(const PopulationSample&)>;

// bootstrap_best of (extractor value, error) per flop bin. Throws on a bin
// with no complete samples.
std::vector<ParamTrendBand> param_trends(std::span<const PopulationSample> population,
                                         const ParamExtractor& extractor,
                                         std::span<const FlopBin> bins, std::uint64_t seed = 0);

// Common extractors for reports.
double total_depth(const PopulationSample& s);
double last_stage_width(const PopulationSample& s);

}  // namespace dsd::popstats
