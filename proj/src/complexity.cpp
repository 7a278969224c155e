#include "dsd/complexity.hpp"

#include <cmath>
#include <stdexcept>

namespace dsd::complexity {

ComplexityReport operator+(const ComplexityReport& a, const ComplexityReport& b) {
  return {a.flops + b.flops, a.params + b.params, a.acts + b.acts, std::nullopt};
}

namespace {

// k x k conv, w_in -> w_out at output resolution r, `groups` groups.
ComplexityReport conv_cx(int k, int w_in, int w_out, int r, int groups = 1) {
  const double r2 = static_cast<double>(r) * r;
  const double per_pos = static_cast<double>(k) * k * (w_in / groups) * w_out;
  return {per_pos * r2, per_pos, static_cast<double>(w_out) * r2, std::nullopt};
}

int ceil_half(int r) { return (r + 1) / 2; }

}  // namespace

ComplexityReport conv_metrics(ConvKind kind, int w_in, int w_out, int r_out, int group_width) {
  if (w_in < 1 || w_out < 1 || r_out < 1)
    throw std::invalid_argument("conv widths and resolution must be positive");
  switch (kind) {
    case ConvKind::Conv1x1:
      return conv_cx(1, w_in, w_out, r_out);
    case ConvKind::Conv3x3:
      return conv_cx(3, w_in, w_out, r_out);
    case ConvKind::Conv3x3Group:
      if (w_in != w_out) throw std::invalid_argument("group conv requires w_in == w_out");
      if (group_width < 1 || w_in % group_width != 0)
        throw std::invalid_argument("group width does not divide width; apply_group_compat first");
      return conv_cx(3, w_in, w_out, r_out, w_in / group_width);
    case ConvKind::Conv3x3Depthwise:
      if (w_in != w_out) throw std::invalid_argument("depthwise conv requires w_in == w_out");
      return conv_cx(3, w_in, w_out, r_out, w_in);
  }
  throw std::logic_error("unknown conv kind");
}

ComplexityReport block_metrics_inner(netspec::BlockType type, int w_in, int w_out, int w_inner,
                                     int g, int r_in, int stride) {
  if (stride != 1 && stride != 2) throw std::invalid_argument("stride must be 1 or 2");
  const int r_out = stride == 2 ? ceil_half(r_in) : r_in;
  const bool has_residual = type != netspec::BlockType::V;
  const bool needs_proj = has_residual && (stride != 1 || w_in != w_out);

  ComplexityReport total;
  switch (type) {
    case netspec::BlockType::V:
    case netspec::BlockType::VR:
      // Single 3x3 conv; the stride lives in it.
      total = conv_metrics(ConvKind::Conv3x3, w_in, w_out, r_out);
      break;
    case netspec::BlockType::X:
    case netspec::BlockType::R:
    case netspec::BlockType::Y: {
      // 1x1 at input resolution, strided 3x3 (group for X/Y), final 1x1.
      total = conv_metrics(ConvKind::Conv1x1, w_in, w_inner, r_in);
      if (type == netspec::BlockType::R)
        total = total + conv_metrics(ConvKind::Conv3x3, w_inner, w_inner, r_out);
      else
        total = total + conv_metrics(ConvKind::Conv3x3Group, w_inner, w_inner, r_out, g);
      if (type == netspec::BlockType::Y) {
        // SE on pooled features: two 1x1 convs at resolution 1 plus the
        // elementwise rescale of the inner tensor.
        const int hidden = std::max(1, static_cast<int>(std::llround(w_in / 4.0)));
        total = total + conv_metrics(ConvKind::Conv1x1, w_inner, hidden, 1);
        total = total + conv_metrics(ConvKind::Conv1x1, hidden, w_inner, 1);
        total.flops += static_cast<double>(w_inner) * r_out * r_out;
      }
      total = total + conv_metrics(ConvKind::Conv1x1, w_inner, w_out, r_out);
      break;
    }
  }
  if (needs_proj) total = total + conv_metrics(ConvKind::Conv1x1, w_in, w_out, r_out);
  return total;
}

ComplexityReport block_metrics(netspec::BlockType type, int w_in, int w_out, double b, int g,
                               int r_in, int stride) {
  netspec::StageSpec probe{1, w_out, b, g};
  const int inner = netspec::inner_width_raw(probe);
  if (type == netspec::BlockType::X || type == netspec::BlockType::Y) {
    if (g < 1 || inner % g != 0)
      throw std::invalid_argument("inner width incompatible with group width; apply_group_compat first");
  }
  return block_metrics_inner(type, w_in, w_out, inner, g, r_in, stride);
}

NetworkBreakdown network_breakdown(const netspec::AnyNetSpec& spec) {
  if (spec.stages.empty()) throw std::invalid_argument("spec has no stages");
  NetworkBreakdown out;

  const int r_stem = spec.stem_kind == netspec::StemKind::Res ? ceil_half(spec.resolution)
                                                              : netspec::stem_resolution(spec);
  const int stem_k = spec.stem_kind == netspec::StemKind::Res ? 7 : 3;
  out.stem = conv_cx(stem_k, 3, spec.stem_width, r_stem);
  // The res stem's 3x3 maxpool is not a conv: no flops under the
  // multiply-add convention, no params, no counted activations.

  const auto resolutions = netspec::stage_resolutions(spec);
  int prev_w = spec.stem_width;
  int prev_r = netspec::stem_resolution(spec);
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    const auto& st = spec.stages[i];
    const auto resolved = netspec::resolve_stage(st);
    for (int j = 0; j < st.depth; ++j) {
      const int w_in = j == 0 ? prev_w : st.width;
      const int r_in = j == 0 ? prev_r : resolutions[i];
      const int stride = j == 0 ? netspec::first_block_stride(spec, static_cast<int>(i)) : 1;
      out.body = out.body + block_metrics_inner(spec.block_type, w_in, st.width,
                                                resolved.width, resolved.group_width, r_in, stride);
    }
    prev_w = st.width;
    prev_r = resolutions[i];
  }

  // Average pool (not a conv) then fully connected head; counted in flops
  // and params, not acts.
  const double fc = static_cast<double>(prev_w) * spec.num_classes;
  out.head = {fc, fc, 0, std::nullopt};
  return out;
}

ComplexityReport network_metrics(const netspec::AnyNetSpec& spec) {
  return network_breakdown(spec).total();
}

double runtime_model(double flops, double acts, const std::array<double, 3>& coeffs) {
  return coeffs[0] * flops + coeffs[1] * acts + coeffs[2];
}

std::array<double, 3> fit_runtime_coeffs(std::span<const RuntimeSample> samples) {
  if (samples.size() < 3) throw std::invalid_argument("need at least 3 samples");
  // Normal equations over columns (flops, acts, 1).
  long double ata[3][3] = {};
  long double atb[3] = {};
  for (const auto& s : samples) {
    const long double row[3] = {s.flops, s.acts, 1.0L};
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
      atb[i] += row[i] * s.runtime;
    }
  }
  // Gaussian elimination with partial pivoting. A pivot that collapses
  // relative to its column's squared norm signals rank deficiency.
  long double diag[3] = {ata[0][0], ata[1][1], ata[2][2]};
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(static_cast<double>(ata[r][col])) >
          std::fabs(static_cast<double>(ata[pivot][col])))
        pivot = r;
    if (fabsl(ata[pivot][col]) <= diag[col] * 1e-12L)
      throw std::runtime_error("rank-deficient runtime fit");
    if (pivot != col) {
      for (int j = 0; j < 3; ++j) std::swap(ata[pivot][j], ata[col][j]);
      std::swap(atb[pivot], atb[col]);
    }
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const long double f = ata[r][col] / ata[col][col];
      for (int j = 0; j < 3; ++j) ata[r][j] -= f * ata[col][j];
      atb[r] -= f * atb[col];
    }
  }
  return {static_cast<double>(atb[0] / ata[0][0]), static_cast<double>(atb[1] / ata[1][1]),
          static_cast<double>(atb[2] / ata[2][2])};
}

}  // namespace dsd::complexity
