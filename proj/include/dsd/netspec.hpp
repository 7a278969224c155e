#pragma once

#include <optional>
#include <string>
#include <vector>

// Network structure specifications and the structural rules shared by all
// design spaces: stage validation, group-width compatibility, refinement
// constraints, and the canonical serialization that feeds spec hashing.
namespace dsd::netspec {

// X: residual bottleneck with group conv. R: same without groups. V: plain
// 3x3 conv block. VR: V plus residual. Y: X plus squeeze-and-excitation.
// X and Y use (b, g); R ignores g; V and VR ignore both.
enum class BlockType { X, R, V, VR, Y };

std::string to_string(BlockType t);
BlockType block_type_from_string(const std::string& s);

// "simple" is the stride-two 3x3 conv stem used by every sampled network.
// "res" is the classic 7x7 conv + 3x3 maxpool stem (both stride two); it
// exists so ResNe(X)t-style reference structures can be expressed for
// complexity accounting, and implies a stride-one first stage.
enum class StemKind { Simple, Res };

struct StageSpec {
  int depth = 1;            // d_i, blocks in the stage
  int width = 8;            // w_i, output channels
  double bottleneck = 1.0;  // b_i, inner width is w_i / b_i (b < 1 expands)
  int group_width = 1;      // g_i, channels per group in the 3x3 conv
};

struct AnyNetSpec {
  BlockType block_type = BlockType::X;
  int stem_width = 32;
  int resolution = 224;
  int num_classes = 1000;
  std::vector<StageSpec> stages;
  StemKind stem_kind = StemKind::Simple;
};

// The 6-parameter generator behind RegNet-style spaces.
struct RegNetParams {
  int depth = 12;        // total block count
  double w0 = 24;        // initial width
  double wa = 24;        // width slope
  double wm = 2.0;       // width multiplier
  double bottleneck = 1.0;
  int group_width = 8;
  BlockType block_type = BlockType::X;
  int resolution = 224;
};

// Nearest multiple of `multiple`, ties rounded up, never below `multiple`.
int round_to_multiple(double value, int multiple);

// Group-width compatibility: g = w if g > w, otherwise round w to the
// nearest multiple of g (ties up). The adjusted width differs from the
// input by at most a third. Idempotent.
struct GroupCompat {
  int width;
  int group_width;
};
GroupCompat apply_group_compat(int w_inner, int g);

// Raw inner width w/b. Throws std::invalid_argument if b does not divide w
// into an integer.
int inner_width_raw(const StageSpec& stage);

// Inner width and group width with compatibility applied. The stored stage
// keeps its sampled output width; this is what the conv accounting uses.
GroupCompat resolve_stage(const StageSpec& stage);

// Resolution after the stem (and stem pool for StemKind::Res).
int stem_resolution(const AnyNetSpec& spec);

// Derived per-stage resolutions; ceil halving from the input resolution.
// (56, 28, 14, 7) for four stages at r=224.
std::vector<int> stage_resolutions(const AnyNetSpec& spec);

// Stride of the first block of stage `index` (2, except stage 0 of a
// res-stem network where the stem pool already halved).
int first_block_stride(const AnyNetSpec& spec, int stage_index);

// Stage widths expanded to one value per block.
std::vector<double> per_block_widths(const AnyNetSpec& spec);

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Sampling domains a spec is validated against. Defaults are the base
// AnyNetX domains; design spaces for other regimes override them.
struct StageLimits {
  int min_depth = 1;
  int max_depth = 16;
  int min_width = 8;
  int max_width = 1024;
  int width_multiple = 8;
  std::vector<double> bottleneck_ratios = {1, 2, 4};
  std::vector<int> group_widths = {1, 2, 4, 8, 16, 32};
};

// Reports every violated invariant with the offending field. Violations are
// values, not failures. Stored group widths are accepted when they equal
// the raw inner width (the compatibility clamp writes that value back).
ValidationResult validate(const AnyNetSpec& spec, const StageLimits& limits = {});

enum class ConstraintKind {
  SharedBottleneck,   // b_i all equal
  SharedGroupWidth,   // g_i all equal up to the compatibility clamp
  IncreasingWidths,   // w_{i+1} >= w_i
  IncreasingDepths,   // d_{i+1} >= d_i
  RegNetLinear,       // widths produced by the quantized linear generator
  UnitBottleneck,     // b_i == 1
  DepthWindow,        // lo <= total depth <= hi
  WidthMultFloor,     // generator wm >= value
  ParamCap,           // params <= value * flops
  ActCap,             // acts <= value * sqrt(flops)
};

std::string to_string(ConstraintKind k);

struct Constraint {
  ConstraintKind kind;
  double lo = 0;     // DepthWindow
  double hi = 0;     // DepthWindow
  double value = 0;  // WidthMultFloor / ParamCap / ActCap coefficient
};

// Facts about a spec that cannot be read off the stages: generator values
// and complexity numbers. Constraints that need missing context report as
// not satisfied with evaluated=false.
struct ConstraintContext {
  std::optional<double> width_multiplier;  // wm of the generator
  bool from_width_generator = false;       // materialized via quantlin
  std::optional<double> flops;
  std::optional<double> params;
  std::optional<double> acts;
};

struct ConstraintCheck {
  Constraint constraint;
  bool satisfied = false;
  bool evaluated = false;
  std::string detail;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  bool pass() const;
};

enum class SpaceKind { AnyNet, RegNet };

struct AnyNetRanges {
  StageLimits limits;
  int num_stages = 4;
};

// Discrete sampling grids for the generator parameters. wm values are kept
// as integer hundredths so grid-aligned fits are exact.
struct RegNetRanges {
  int depth_min = 1;
  int depth_max = 63;
  std::vector<double> w0_values;   // default 8,16,...,248
  std::vector<double> wa_values;   // default 1..32 step 1, 36..252 step 4
  std::vector<int> wm_hundredths;  // default 150,155,...,300
  std::vector<double> bottleneck_ratios = {1, 2, 4};
  std::vector<int> group_widths = {1, 2, 4, 8, 16, 32};
  int num_stages = 4;
  int width_multiple = 8;

  static RegNetRanges defaults();
};

// A named space: sampling ranges plus the cumulative constraint list.
struct DesignSpaceDef {
  std::string name;
  SpaceKind kind = SpaceKind::AnyNet;
  AnyNetRanges anynet;
  RegNetRanges regnet;
  std::vector<Constraint> constraints;
  BlockType block_type = BlockType::X;
  int resolution = 224;
  int stem_width = 32;
  int num_classes = 1000;
  std::optional<std::pair<double, double>> flop_window;

  bool has_constraint(ConstraintKind k) const;
  const Constraint* find_constraint(ConstraintKind k) const;
  // Validation domains implied by the ranges.
  StageLimits stage_limits() const;
};

ConstraintReport check_constraints(const AnyNetSpec& spec, const DesignSpaceDef& def,
                                   const ConstraintContext& ctx = {});

// Canonical serialization: {"block_type":..,"stem_width":..,"resolution":..,
// "num_classes":..,"stages":[{"d":..,"w":..,"b":..,"g":..},...]} with fields
// in exactly that order. A "stem_kind" field is appended only for the
// non-default res stem. These bytes feed the spec hash.
std::string canonical_json(const AnyNetSpec& spec);
AnyNetSpec spec_from_json(const std::string& text);

// ResNet-50 as a structural spec (res stem, R blocks, b=4); reference for
// complexity accounting only.
AnyNetSpec resnet50_spec();

}  // namespace dsd::netspec
