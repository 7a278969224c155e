#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Command implementations behind the dsd tool. Each returns a process exit
// code and writes artifacts that embed a run manifest (population headers
// carry it as a field, CSV outputs as a leading '#' comment line).
namespace dsd::cli {

inline constexpr const char* kToolName = "dsd";
inline constexpr const char* kToolVersion = "0.1.0";

// 0 success; distinct nonzero codes per failure class.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kMissingInput = 4,
};

struct SpaceSelection {
  std::string space;        // preset name, ignored when config is set
  std::string config;       // design space config file
  std::string block_type;   // override (x, r, v, vr, y)
  int stages = 0;           // override when > 0
  int resolution = 0;       // override when > 0
};

struct SampleArgs {
  SpaceSelection space;
  int n = 500;
  std::string flops;  // "lo:hi" in raw flops, scientific notation accepted
  std::uint64_t seed = 0;
  std::string out;
  int workers = 1;
  int max_attempts = 20000;
};
int cmd_sample(const SampleArgs& args);

struct ComplexityArgs {
  std::string spec_path;      // canonical spec JSON
  std::string builtin;        // e.g. "resnet-50"
  std::string runtime_coeffs; // "a:b:c" for the modeled runtime
  bool as_json = false;
};
int cmd_complexity(const ComplexityArgs& args);

struct FitArgs {
  std::string population;
  std::string out;
};
int cmd_fit(const FitArgs& args);

struct AnalyzeArgs {
  std::string population;
  std::vector<std::string> compare;
  std::string out_dir;
  int bins = 1;  // flop bins for the bootstrap bands
  bool svg = false;
  std::uint64_t seed = 0;
};
int cmd_analyze(const AnalyzeArgs& args);

struct BestArgs {
  std::string population;
  int k = 25;
  std::string out;  // optional CSV
};
int cmd_best(const BestArgs& args);

struct SizeArgs {
  SpaceSelection space;
};
int cmd_size(const SizeArgs& args);

struct ExportArgs {
  std::string population;
  std::string out_dir;
};
int cmd_export(const ExportArgs& args);

struct SurrogateArgs {
  std::string population;
  std::uint64_t seed = 0;
  std::string out;  // defaults to rewriting the input
  bool overwrite_existing = false;
};
int cmd_surrogate(const SurrogateArgs& args);

struct IngestArgs {
  std::string population;
  std::string errors;
  std::string out;  // defaults to rewriting the input
  std::optional<int> expected_epochs;
};
int cmd_ingest(const IngestArgs& args);

}  // namespace dsd::cli
