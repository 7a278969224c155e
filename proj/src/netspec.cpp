#include "dsd/netspec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <json.hpp>

namespace dsd::netspec {

std::string to_string(BlockType t) {
  switch (t) {
    case BlockType::X: return "X";
    case BlockType::R: return "R";
    case BlockType::V: return "V";
    case BlockType::VR: return "VR";
    case BlockType::Y: return "Y";
  }
  throw std::logic_error("unknown block type");
}

BlockType block_type_from_string(const std::string& s) {
  std::string u;
  for (char c : s) u.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (u == "X") return BlockType::X;
  if (u == "R") return BlockType::R;
  if (u == "V") return BlockType::V;
  if (u == "VR") return BlockType::VR;
  if (u == "Y") return BlockType::Y;
  throw std::invalid_argument("unknown block type: " + s);
}

int round_to_multiple(double value, int multiple) {
  if (multiple < 1) throw std::invalid_argument("multiple must be >= 1");
  long long k = static_cast<long long>(std::floor(value / multiple + 0.5));
  if (k < 1) k = 1;
  return static_cast<int>(k * multiple);
}

GroupCompat apply_group_compat(int w_inner, int g) {
  if (w_inner < 1 || g < 1) throw std::invalid_argument("group compat needs positive width and group width");
  if (g > w_inner) return {w_inner, w_inner};
  return {round_to_multiple(w_inner, g), g};
}

int inner_width_raw(const StageSpec& stage) {
  if (stage.bottleneck <= 0) throw std::invalid_argument("bottleneck ratio must be positive");
  const double q = stage.width / stage.bottleneck;
  const long long r = std::llround(q);
  if (r < 1 || std::fabs(q - static_cast<double>(r)) > 1e-6)
    throw std::invalid_argument("bottleneck ratio does not divide width");
  return static_cast<int>(r);
}

GroupCompat resolve_stage(const StageSpec& stage) {
  return apply_group_compat(inner_width_raw(stage), stage.group_width);
}

namespace {
int ceil_half(int r) { return (r + 1) / 2; }
}  // namespace

int stem_resolution(const AnyNetSpec& spec) {
  const int after_conv = ceil_half(spec.resolution);
  return spec.stem_kind == StemKind::Res ? ceil_half(after_conv) : after_conv;
}

int first_block_stride(const AnyNetSpec& spec, int stage_index) {
  return (spec.stem_kind == StemKind::Res && stage_index == 0) ? 1 : 2;
}

std::vector<int> stage_resolutions(const AnyNetSpec& spec) {
  std::vector<int> out;
  out.reserve(spec.stages.size());
  int cur = stem_resolution(spec);
  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    if (first_block_stride(spec, static_cast<int>(i)) == 2) cur = ceil_half(cur);
    out.push_back(cur);
  }
  return out;
}

std::vector<double> per_block_widths(const AnyNetSpec& spec) {
  std::vector<double> out;
  for (const auto& s : spec.stages)
    for (int j = 0; j < s.depth; ++j) out.push_back(static_cast<double>(s.width));
  return out;
}

namespace {

bool contains_ratio(const std::vector<double>& domain, double b) {
  for (double v : domain)
    if (std::fabs(v - b) <= 1e-9) return true;
  return false;
}

}  // namespace

ValidationResult validate(const AnyNetSpec& spec, const StageLimits& limits) {
  ValidationResult res;
  auto add = [&res](std::string field, std::string message) {
    res.violations.push_back({std::move(field), std::move(message)});
  };

  if (spec.stages.size() < 3 || spec.stages.size() > 5)
    add("stages", "stage count must be between 3 and 5, got " + std::to_string(spec.stages.size()));
  if (spec.resolution < 1) add("resolution", "resolution must be positive");
  if (spec.stem_width < 1) add("stem_width", "stem width must be positive");
  if (spec.num_classes < 1) add("num_classes", "num_classes must be positive");

  for (std::size_t i = 0; i < spec.stages.size(); ++i) {
    const StageSpec& s = spec.stages[i];
    const std::string at = "stages[" + std::to_string(i) + "]";
    if (s.depth < limits.min_depth)
      add(at + ".depth", "depth below " + std::to_string(limits.min_depth));
    if (s.depth > limits.max_depth)
      add(at + ".depth", "depth exceeds " + std::to_string(limits.max_depth));
    if (s.width < limits.min_width || s.width > limits.max_width)
      add(at + ".width", "width outside [" + std::to_string(limits.min_width) + ", " +
                             std::to_string(limits.max_width) + "]");
    if (limits.width_multiple > 1 && s.width % limits.width_multiple != 0)
      add(at + ".width", "width not divisible by " + std::to_string(limits.width_multiple));
    if (!contains_ratio(limits.bottleneck_ratios, s.bottleneck))
      add(at + ".bottleneck", "bottleneck ratio not in the allowed set");

    int inner = 0;
    if (s.bottleneck <= 0) {
      add(at + ".bottleneck", "bottleneck ratio must be positive");
    } else {
      const double q = s.width / s.bottleneck;
      const long long r = std::llround(q);
      if (r < 1 || std::fabs(q - static_cast<double>(r)) > 1e-6)
        add(at + ".bottleneck", "bottleneck ratio does not divide width into an integer");
      else
        inner = static_cast<int>(r);
    }

    if (s.group_width < 1) {
      add(at + ".group_width", "group width must be positive");
    } else if (inner > 0) {
      // The compatibility clamp stores g = inner, which may leave the domain.
      const bool in_domain =
          std::find(limits.group_widths.begin(), limits.group_widths.end(), s.group_width) !=
          limits.group_widths.end();
      if (!in_domain && s.group_width != inner)
        add(at + ".group_width", "group width not in the allowed set");
    }
  }
  return res;
}

bool ConstraintReport::pass() const {
  for (const auto& c : checks)
    if (!c.evaluated || !c.satisfied) return false;
  return true;
}

std::string to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::SharedBottleneck: return "shared_b";
    case ConstraintKind::SharedGroupWidth: return "shared_g";
    case ConstraintKind::IncreasingWidths: return "increasing_w";
    case ConstraintKind::IncreasingDepths: return "increasing_d";
    case ConstraintKind::RegNetLinear: return "regnet_linear";
    case ConstraintKind::UnitBottleneck: return "b_fixed";
    case ConstraintKind::DepthWindow: return "depth_window";
    case ConstraintKind::WidthMultFloor: return "wm_floor";
    case ConstraintKind::ParamCap: return "param_cap";
    case ConstraintKind::ActCap: return "act_cap";
  }
  throw std::logic_error("unknown constraint kind");
}

bool DesignSpaceDef::has_constraint(ConstraintKind k) const {
  return find_constraint(k) != nullptr;
}

const Constraint* DesignSpaceDef::find_constraint(ConstraintKind k) const {
  for (const auto& c : constraints)
    if (c.kind == k) return &c;
  return nullptr;
}

RegNetRanges RegNetRanges::defaults() {
  RegNetRanges r;
  for (int w = 8; w < 256; w += 8) r.w0_values.push_back(w);
  for (int a = 1; a <= 32; ++a) r.wa_values.push_back(a);
  for (int a = 36; a < 256; a += 4) r.wa_values.push_back(a);
  for (int h = 150; h <= 300; h += 5) r.wm_hundredths.push_back(h);
  return r;
}

StageLimits DesignSpaceDef::stage_limits() const {
  if (kind == SpaceKind::AnyNet) return anynet.limits;
  StageLimits lim;
  lim.min_depth = 1;
  lim.max_depth = regnet.depth_max;
  lim.min_width = regnet.width_multiple;
  const double max_w0 = *std::max_element(regnet.w0_values.begin(), regnet.w0_values.end());
  const double max_wa = *std::max_element(regnet.wa_values.begin(), regnet.wa_values.end());
  const double max_wm =
      *std::max_element(regnet.wm_hundredths.begin(), regnet.wm_hundredths.end()) / 100.0;
  const double u_max = max_w0 + max_wa * (regnet.depth_max - 1);
  lim.max_width = round_to_multiple(u_max * std::sqrt(max_wm) + regnet.width_multiple,
                                    regnet.width_multiple);
  lim.width_multiple = regnet.width_multiple;
  lim.bottleneck_ratios = regnet.bottleneck_ratios;
  lim.group_widths = regnet.group_widths;
  return lim;
}

ConstraintReport check_constraints(const AnyNetSpec& spec, const DesignSpaceDef& def,
                                   const ConstraintContext& ctx) {
  ConstraintReport report;
  const auto& st = spec.stages;
  for (const Constraint& c : def.constraints) {
    ConstraintCheck check;
    check.constraint = c;
    check.evaluated = true;
    check.satisfied = true;
    switch (c.kind) {
      case ConstraintKind::SharedBottleneck:
        for (std::size_t i = 1; i < st.size(); ++i)
          if (st[i].bottleneck != st[0].bottleneck) {
            check.satisfied = false;
            check.detail = "b differs at stage " + std::to_string(i + 1);
            break;
          }
        break;
      case ConstraintKind::SharedGroupWidth: {
        // Equal up to the per-stage compatibility clamp of one drawn g.
        int gmax = 1;
        for (const auto& s : st) gmax = std::max(gmax, s.group_width);
        for (std::size_t i = 0; i < st.size(); ++i) {
          const int expected = apply_group_compat(inner_width_raw(st[i]), gmax).group_width;
          if (st[i].group_width != expected) {
            check.satisfied = false;
            check.detail = "g differs at stage " + std::to_string(i + 1);
            break;
          }
        }
        break;
      }
      case ConstraintKind::IncreasingWidths:
        for (std::size_t i = 1; i < st.size(); ++i)
          if (st[i].width < st[i - 1].width) {
            check.satisfied = false;
            check.detail = "width decreases at stage " + std::to_string(i + 1);
            break;
          }
        break;
      case ConstraintKind::IncreasingDepths:
        for (std::size_t i = 1; i < st.size(); ++i)
          if (st[i].depth < st[i - 1].depth) {
            check.satisfied = false;
            check.detail = "depth decreases at stage " + std::to_string(i + 1);
            break;
          }
        break;
      case ConstraintKind::RegNetLinear:
        if (ctx.from_width_generator) {
          check.satisfied = true;
        } else {
          check.evaluated = false;
          check.satisfied = false;
          check.detail = "requires generator provenance";
        }
        break;
      case ConstraintKind::UnitBottleneck:
        for (std::size_t i = 0; i < st.size(); ++i)
          if (st[i].bottleneck != 1.0) {
            check.satisfied = false;
            check.detail = "b != 1 at stage " + std::to_string(i + 1);
            break;
          }
        break;
      case ConstraintKind::DepthWindow: {
        int total = 0;
        for (const auto& s : st) total += s.depth;
        check.satisfied = total >= c.lo && total <= c.hi;
        if (!check.satisfied) check.detail = "total depth " + std::to_string(total);
        break;
      }
      case ConstraintKind::WidthMultFloor:
        if (ctx.width_multiplier) {
          check.satisfied = *ctx.width_multiplier >= c.value;
        } else {
          check.evaluated = false;
          check.satisfied = false;
          check.detail = "requires generator width multiplier";
        }
        break;
      case ConstraintKind::ParamCap:
        if (ctx.params && ctx.flops) {
          check.satisfied = *ctx.params <= c.value * *ctx.flops;
        } else {
          check.evaluated = false;
          check.satisfied = false;
          check.detail = "requires complexity context";
        }
        break;
      case ConstraintKind::ActCap:
        if (ctx.acts && ctx.flops) {
          check.satisfied = *ctx.acts <= c.value * std::sqrt(*ctx.flops);
        } else {
          check.evaluated = false;
          check.satisfied = false;
          check.detail = "requires complexity context";
        }
        break;
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

std::string canonical_json(const AnyNetSpec& spec) {
  nlohmann::ordered_json j;
  j["block_type"] = to_string(spec.block_type);
  j["stem_width"] = spec.stem_width;
  j["resolution"] = spec.resolution;
  j["num_classes"] = spec.num_classes;
  auto stages = nlohmann::ordered_json::array();
  for (const auto& s : spec.stages) {
    nlohmann::ordered_json js;
    js["d"] = s.depth;
    js["w"] = s.width;
    js["b"] = s.bottleneck;
    js["g"] = s.group_width;
    stages.push_back(std::move(js));
  }
  j["stages"] = std::move(stages);
  if (spec.stem_kind == StemKind::Res) j["stem_kind"] = "res";
  return j.dump();
}

AnyNetSpec spec_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  AnyNetSpec spec;
  spec.block_type = block_type_from_string(j.at("block_type").get<std::string>());
  spec.stem_width = j.value("stem_width", 32);
  spec.resolution = j.value("resolution", 224);
  spec.num_classes = j.value("num_classes", 1000);
  for (const auto& js : j.at("stages")) {
    StageSpec s;
    s.depth = js.at("d").get<int>();
    s.width = js.at("w").get<int>();
    s.bottleneck = js.at("b").get<double>();
    s.group_width = js.at("g").get<int>();
    spec.stages.push_back(s);
  }
  if (j.value("stem_kind", std::string("simple")) == "res") spec.stem_kind = StemKind::Res;
  return spec;
}

AnyNetSpec resnet50_spec() {
  AnyNetSpec spec;
  spec.block_type = BlockType::R;
  spec.stem_width = 64;
  spec.stem_kind = StemKind::Res;
  spec.stages = {
      {3, 256, 4.0, 64},
      {4, 512, 4.0, 128},
      {6, 1024, 4.0, 256},
      {3, 2048, 4.0, 512},
  };
  return spec;
}

}  // namespace dsd::netspec
