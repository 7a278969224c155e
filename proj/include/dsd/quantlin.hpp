#pragma once

#include <optional>
#include <span>
#include <vector>

// The quantized linear width parameterization: a depth-d profile of block
// widths u_j = w0 + wa*j, snapped to powers of a multiplier wm, plus the
// grid-search fit that measures how well observed widths follow the rule.
namespace dsd::quantlin {

struct BlockWidthProfile {
  double w0 = 0;
  double wa = 0;
  double wm = 0;
  std::vector<double> u;  // continuous widths, w0 + wa*j
  std::vector<double> s;  // exponents solving u_j = w0 * wm^s_j
  std::vector<int> k;     // s_j rounded half away from zero
  std::vector<double> w;  // quantized widths w0 * wm^k_j, unrounded channels

  int depth() const { return static_cast<int>(w.size()); }
};

// w0 * wm^k, the one definition shared by generation and fitting so that
// grid-aligned fits reproduce widths bitwise.
double quantized_width(double w0, double wm, int k);

// Evaluates the parameterization for d blocks. Requires d >= 1, w0 > 0,
// wa >= 0 and wm > 1 (the quantization exponent is undefined at wm = 1).
BlockWidthProfile gen_block_widths(int d, double w0, double wa, double wm);

struct StageDims {
  double width = 0;  // rounded to round_to when round_to > 0
  int depth = 0;
};

// Collapses runs of equal quantized width into stages and rounds stage
// widths to the nearest multiple of round_to (0 keeps them exact). Returns
// nullopt when the stage count differs from expected_stages (pass 0 to
// accept any count); rejection is a value, not a failure.
std::optional<std::vector<StageDims>> to_stages(const BlockWidthProfile& profile,
                                                int round_to = 8, int expected_stages = 4);

// One width per block from a stage breakdown.
std::vector<double> expand_stages(const std::vector<StageDims>& stages);

// Mean absolute log-ratio of predicted to observed per-block widths, with
// d fixed to the observed depth.
double efit(double w0, double wa, double wm, std::span<const double> observed);

struct LinearFit {
  double w0 = 0;
  double wa = 0;
  double wm = 0;
  double e_fit = 0;
};

// Search grid for fit_linear. wm is kept in integer hundredths and
// converted as value/100.0 in exactly one place.
struct FitGrid {
  std::vector<double> w0_values;
  std::vector<double> wa_values;
  std::vector<int> wm_hundredths;

  // w0 in {8,16,...,256}; wa in {1..32 step 1, 36..256 step 4};
  // wm in {1.05,1.10,...,3.00}.
  static const FitGrid& standard();
};

// Exhaustive grid search minimizing efit; iteration order is w0, then wa,
// then wm, ascending, and the first minimum wins ties.
LinearFit fit_linear(std::span<const double> observed, const FitGrid& grid = FitGrid::standard());

}  // namespace dsd::quantlin
