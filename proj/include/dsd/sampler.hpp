#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsd/netspec.hpp"
#include "dsd/popstats.hpp"

// Draws valid model populations from a DesignSpaceDef: log-uniform sampling
// over discrete domains, whole-spec rejection for constraints, complexity
// window rejection, and per-index derived seeds so populations are identical
// for any worker count.
namespace dsd::sampler {

// Raised when a def cannot produce an accepted sample within the attempt
// budget (for example an empty flop window).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplerConfig {
  netspec::DesignSpaceDef space;
  double flops_lo = 360e6;
  double flops_hi = 400e6;
  int population_size = 500;
  std::uint64_t master_seed = 0;
  int max_attempts_per_sample = 20000;
  int workers = 1;
};

// One valid spec from an AnyNet-kind def. Shared parameters are drawn once;
// monotonicity constraints are enforced by redrawing the whole spec. Same
// (def, seed) gives the same spec.
netspec::AnyNetSpec sample_anynet(const netspec::DesignSpaceDef& def, std::uint64_t seed,
                                  int max_attempts = 100000);

struct RegNetDraw {
  netspec::RegNetParams params;
  netspec::AnyNetSpec spec;
};

// One draw from a RegNet-kind def: generator parameters from their grids,
// widths materialized through the quantized linear rule, stage-count
// rejection, then group compatibility.
RegNetDraw sample_regnet(const netspec::DesignSpaceDef& def, std::uint64_t seed,
                         int max_attempts = 100000);

// n samples, each inside the flop window, sample i drawn from seed
// derive_seed(master_seed, i). Complexity and spec hashes are filled in.
std::vector<popstats::PopulationSample> sample_population(const SamplerConfig& cfg);

// Approximate cardinality per the design-space summary formulas: product of
// per-parameter domain sizes, a factor moved out of the per-stage power for
// each shared parameter, one 1/S! divisor per monotonicity constraint, and
// 64 quantization levels per continuous generator parameter.
double design_space_size(const netspec::DesignSpaceDef& def);

// Named presets: anynetx-a through anynetx-e, regnet, regnetx-constrained.
netspec::DesignSpaceDef preset(const std::string& name);
std::vector<std::string> preset_names();

// key = value config format mirroring DesignSpaceDef's fields.
netspec::DesignSpaceDef load_design_space(const std::string& path);

}  // namespace dsd::sampler
