#pragma once

#include <array>
#include <optional>
#include <span>

#include "dsd/netspec.hpp"

// Analytic flop / parameter / activation accounting. Flops are multiply-adds,
// params count conv weights plus the head (no batch-norm, no biases), and
// acts sum the output tensor sizes of all conv layers.
namespace dsd::complexity {

struct ComplexityReport {
  double flops = 0;
  double params = 0;
  double acts = 0;
  std::optional<double> runtime_est;
};

ComplexityReport operator+(const ComplexityReport& a, const ComplexityReport& b);

enum class ConvKind { Conv1x1, Conv3x3, Conv3x3Group, Conv3x3Depthwise };

// Per-conv metrics at output resolution r_out:
//   1x1:        w_in*w_out*r^2        3x3:  9*w_in*w_out*r^2
//   3x3 group:  9*w*g*r^2 (w_in == w_out == w, groups of group_width)
//   3x3 dw:     9*w*r^2   (group conv with group_width 1)
// params = flops / r^2, acts = w_out * r^2. Group kinds require w_in == w_out
// divisible by the group width; run apply_group_compat first.
ComplexityReport conv_metrics(ConvKind kind, int w_in, int w_out, int r_out, int group_width = 0);

// Full block: the main-path convs, a 1x1 residual projection when the block
// strides or changes width (X, R, VR, Y), and for Y the squeeze-excitation
// pair of 1x1 convs on pooled features (hidden width round(w_in/4)) plus the
// elementwise rescale. The inner width is w_out / b, which must already be
// group compatible.
ComplexityReport block_metrics(netspec::BlockType type, int w_in, int w_out, double b, int g,
                               int r_in, int stride);

// Same with the inner width passed explicitly (what network accounting uses,
// since compatibility can move the inner width off w_out / b).
ComplexityReport block_metrics_inner(netspec::BlockType type, int w_in, int w_out, int w_inner,
                                     int g, int r_in, int stride);

struct NetworkBreakdown {
  ComplexityReport stem;
  ComplexityReport body;
  ComplexityReport head;
  ComplexityReport total() const { return stem + body + head; }
};

NetworkBreakdown network_breakdown(const netspec::AnyNetSpec& spec);
ComplexityReport network_metrics(const netspec::AnyNetSpec& spec);

// runtime = a*flops + b*acts + c, in arbitrary units.
double runtime_model(double flops, double acts, const std::array<double, 3>& coeffs);

struct RuntimeSample {
  double flops = 0;
  double acts = 0;
  double runtime = 0;
};

// Least-squares fit of the runtime model coefficients.
std::array<double, 3> fit_runtime_coeffs(std::span<const RuntimeSample> samples);

}  // namespace dsd::complexity
