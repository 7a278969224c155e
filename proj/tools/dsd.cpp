#include <CLI11.hpp>

#include "dsd/cli.hpp"

// dsd: sample model populations from network design spaces, account their
// complexity analytically, score them (surrogate or ingested training
// results), and produce EDF / bootstrap / trend reports.
int main(int argc, char** argv) {
  CLI::App app{"network design space engine"};
  app.require_subcommand(1);

  auto add_space_flags = [](CLI::App* cmd, dsd::cli::SpaceSelection& sel) {
    cmd->add_option("--space", sel.space, "design space preset (anynetx-a..e, regnet, regnetx-constrained)");
    cmd->add_option("--config", sel.config, "design space config file (key = value)");
    cmd->add_option("--block", sel.block_type, "block type override (x, r, v, vr, y)");
    cmd->add_option("--stages", sel.stages, "stage count override");
    cmd->add_option("--resolution", sel.resolution, "input resolution override");
  };

  dsd::cli::SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "draw a population into a JSONL file");
  add_space_flags(c_sample, sample.space);
  c_sample->add_option("--n", sample.n, "population size");
  c_sample->add_option("--flops", sample.flops, "flop window lo:hi (raw multiply-adds)");
  c_sample->add_option("--seed", sample.seed, "master seed");
  c_sample->add_option("--out", sample.out, "output population file")->required();
  c_sample->add_option("--workers", sample.workers, "worker threads");
  c_sample->add_option("--max-attempts", sample.max_attempts, "attempts per sample");

  dsd::cli::ComplexityArgs complexity;
  auto* c_complexity = app.add_subcommand("complexity", "flops/params/acts of one spec");
  c_complexity->add_option("--spec", complexity.spec_path, "spec JSON file");
  c_complexity->add_option("--builtin", complexity.builtin, "built-in reference (resnet-50)");
  c_complexity->add_option("--runtime-coeffs", complexity.runtime_coeffs,
                           "a:b:c for runtime = a*flops + b*acts + c");
  c_complexity->add_flag("--json", complexity.as_json, "machine-readable output");

  dsd::cli::FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "per-model quantized linear fits");
  c_fit->add_option("--pop", fit.population, "population file")->required();
  c_fit->add_option("--out", fit.out, "output CSV")->required();

  dsd::cli::AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "EDF, bootstrap bands, trends");
  c_analyze->add_option("--pop", analyze.population, "population file")->required();
  c_analyze->add_option("--compare", analyze.compare, "additional populations to overlay");
  c_analyze->add_option("--out", analyze.out_dir, "output directory")->required();
  c_analyze->add_option("--bins", analyze.bins, "flop bins for bootstrap bands");
  c_analyze->add_option("--seed", analyze.seed, "bootstrap seed");
  c_analyze->add_flag("--svg", analyze.svg, "also render the EDF step plot");

  dsd::cli::BestArgs best;
  auto* c_best = app.add_subcommand("best", "top-k report by error");
  c_best->add_option("--pop", best.population, "population file")->required();
  c_best->add_option("-k,--k", best.k, "how many models");
  c_best->add_option("--out", best.out, "optional output CSV");

  dsd::cli::SizeArgs size;
  auto* c_size = app.add_subcommand("size", "approximate design space cardinality");
  add_space_flags(c_size, size.space);

  dsd::cli::ExportArgs exp;
  auto* c_export = app.add_subcommand("export", "write per-model canonical spec files");
  c_export->add_option("--pop", exp.population, "population file")->required();
  c_export->add_option("--out", exp.out_dir, "output directory")->required();

  dsd::cli::SurrogateArgs surrogate;
  auto* c_surrogate = app.add_subcommand("surrogate", "fill errors from the surrogate model");
  c_surrogate->add_option("--pop", surrogate.population, "population file")->required();
  c_surrogate->add_option("--seed", surrogate.seed, "noise seed");
  c_surrogate->add_option("--out", surrogate.out, "output file (default: rewrite input)");
  c_surrogate->add_flag("--overwrite", surrogate.overwrite_existing, "replace existing errors");

  dsd::cli::IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "join training errors by spec hash");
  c_ingest->add_option("--pop", ingest.population, "population file")->required();
  c_ingest->add_option("--errors", ingest.errors, "error records (JSONL or CSV)")->required();
  c_ingest->add_option("--out", ingest.out, "output file (default: rewrite input)");
  int expected_epochs = -1;
  c_ingest->add_option("--expected-epochs", expected_epochs,
                       "preferred epochs when duplicate errors conflict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dsd::cli::kConfigError;
  }

  if (c_sample->parsed()) return dsd::cli::cmd_sample(sample);
  if (c_complexity->parsed()) return dsd::cli::cmd_complexity(complexity);
  if (c_fit->parsed()) return dsd::cli::cmd_fit(fit);
  if (c_analyze->parsed()) return dsd::cli::cmd_analyze(analyze);
  if (c_best->parsed()) return dsd::cli::cmd_best(best);
  if (c_size->parsed()) return dsd::cli::cmd_size(size);
  if (c_export->parsed()) return dsd::cli::cmd_export(exp);
  if (c_surrogate->parsed()) return dsd::cli::cmd_surrogate(surrogate);
  if (c_ingest->parsed()) {
    if (expected_epochs >= 0) ingest.expected_epochs = expected_epochs;
    return dsd::cli::cmd_ingest(ingest);
  }
  return dsd::cli::kConfigError;
}
