#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dsd/popstats.hpp"
#include "dsd/quantlin.hpp"

// Persistence and provenance: population files (one JSON object per line,
// header first), ingestion of externally produced errors keyed by spec hash,
// and the clearly-labeled deterministic surrogate error source used to
// exercise the pipeline end to end.
namespace dsd::evalstore {

inline constexpr const char* kPopulationFormat = "dsd-population/1";

// FNV-1a over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

// Stable spec digest: FNV-1a 64 of the canonical spec serialization,
// rendered as 16 lowercase hex characters.
std::uint64_t spec_hash_value(const netspec::AnyNetSpec& spec);
std::string spec_hash(const netspec::AnyNetSpec& spec);

struct PopulationHeader {
  std::string format = kPopulationFormat;
  std::string design_space;
  std::uint64_t master_seed = 0;
  int population_size = 0;
  double flops_lo = 0;
  double flops_hi = 0;
  std::string manifest_json;  // embedded run manifest, verbatim JSON object
};

struct PopulationFile {
  PopulationHeader header;
  std::vector<popstats::PopulationSample> records;
};

void write_population(const PopulationFile& pop, std::ostream& out);
void write_population_file(const PopulationFile& pop, const std::string& path);
PopulationFile read_population(std::istream& in);
PopulationFile read_population_file(const std::string& path);

// Recomputes hashes and complexity for every record; returns violations.
std::vector<std::string> verify_population(const PopulationFile& pop);

struct ErrorRecord {
  std::string spec_hash;
  double error = 0;
  std::optional<int> epochs;
  std::string metadata_json;  // free-form, kept verbatim
};

// Reads either the native JSONL form ({"spec_hash":..,"error":..,...}) or a
// two-column CSV (spec_hash,error) with an optional header line.
std::vector<ErrorRecord> read_error_records(std::istream& in);
std::vector<ErrorRecord> read_error_records_file(const std::string& path);

struct IngestConflict {
  std::string spec_hash;
  double kept_error = 0;
  double dropped_error = 0;
};

struct IngestReport {
  int matched = 0;
  std::vector<std::string> orphans;          // hashes with no sample
  std::vector<IngestConflict> conflicts;     // duplicate conflicting errors
  int pending = 0;                           // samples still without errors
};

// Joins by spec hash and marks matched samples as ingested. On conflicting
// duplicates the record whose epochs is closest to expected_epochs wins
// (first seen breaks ties; without expected_epochs the first record wins).
IngestReport ingest_errors(PopulationFile& pop, std::span<const ErrorRecord> records,
                           std::optional<int> expected_epochs = std::nullopt);

// Deterministic stand-in for trained errors; never a claim about real
// training. error = clamp(base + penalties + noise, 0.05, 0.95) with
//   base      = base_error - flop_slope * log10(flops / 400e6)
//   penalties = w_fit * min(e_fit, fit_clip)
//             + w_bottleneck * 1[any b_i != 1]
//             + w_nonmono * (width inversions + depth inversions) / (stages-1)
//   noise     = (u01(spec hash, seed) - 1/2) * noise_width
struct SurrogateConfig {
  double base_error = 0.24;
  double flop_slope = 0.05;
  double w_fit = 0.60;
  double fit_clip = 0.50;
  double w_bottleneck = 0.03;
  double w_nonmono = 0.10;
  double noise_width = 0.02;
  quantlin::FitGrid fit_grid = quantlin::FitGrid::standard();
};

double surrogate_error(const netspec::AnyNetSpec& spec, std::uint64_t noise_seed,
                       const SurrogateConfig& cfg = {});

// Applies the surrogate to every record without an error (or all records
// when overwrite is set); marks them source=surrogate.
int apply_surrogate(PopulationFile& pop, std::uint64_t noise_seed,
                    const SurrogateConfig& cfg = {}, bool overwrite = false);

}  // namespace dsd::evalstore
