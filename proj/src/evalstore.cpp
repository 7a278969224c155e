#include "dsd/evalstore.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "dsd/complexity.hpp"
#include "dsd/rng.hpp"

namespace dsd::evalstore {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t spec_hash_value(const netspec::AnyNetSpec& spec) {
  return fnv1a64(netspec::canonical_json(spec));
}

std::string spec_hash(const netspec::AnyNetSpec& spec) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(spec_hash_value(spec)));
  return std::string(buf);
}

namespace {

nlohmann::ordered_json spec_to_json(const netspec::AnyNetSpec& spec) {
  return nlohmann::ordered_json::parse(netspec::canonical_json(spec));
}

nlohmann::ordered_json regnet_to_json(const netspec::RegNetParams& p) {
  nlohmann::ordered_json j;
  j["d"] = p.depth;
  j["w0"] = p.w0;
  j["wa"] = p.wa;
  j["wm"] = p.wm;
  j["b"] = p.bottleneck;
  j["g"] = p.group_width;
  return j;
}

netspec::RegNetParams regnet_from_json(const nlohmann::json& j, netspec::BlockType bt,
                                       int resolution) {
  netspec::RegNetParams p;
  p.depth = j.at("d").get<int>();
  p.w0 = j.at("w0").get<double>();
  p.wa = j.at("wa").get<double>();
  p.wm = j.at("wm").get<double>();
  p.bottleneck = j.at("b").get<double>();
  p.group_width = j.at("g").get<int>();
  p.block_type = bt;
  p.resolution = resolution;
  return p;
}

nlohmann::ordered_json record_to_json(const popstats::PopulationSample& s) {
  nlohmann::ordered_json j;
  j["spec_hash"] = s.spec_hash;
  j["spec"] = spec_to_json(s.spec);
  if (s.regnet_params) j["regnet_params"] = regnet_to_json(*s.regnet_params);
  nlohmann::ordered_json cx;
  cx["flops"] = static_cast<std::uint64_t>(std::llround(s.complexity.flops));
  cx["params"] = static_cast<std::uint64_t>(std::llround(s.complexity.params));
  cx["acts"] = static_cast<std::uint64_t>(std::llround(s.complexity.acts));
  j["complexity"] = std::move(cx);
  if (s.error) {
    j["error"] = *s.error;
    j["source"] = popstats::to_string(s.source);
  }
  if (s.epochs) j["epochs"] = *s.epochs;
  return j;
}

popstats::PopulationSample record_from_json(const nlohmann::json& j) {
  popstats::PopulationSample s;
  s.spec_hash = j.at("spec_hash").get<std::string>();
  s.spec = netspec::spec_from_json(j.at("spec").dump());
  if (j.contains("regnet_params"))
    s.regnet_params = regnet_from_json(j["regnet_params"], s.spec.block_type, s.spec.resolution);
  const auto& cx = j.at("complexity");
  s.complexity.flops = static_cast<double>(cx.at("flops").get<std::uint64_t>());
  s.complexity.params = static_cast<double>(cx.at("params").get<std::uint64_t>());
  s.complexity.acts = static_cast<double>(cx.at("acts").get<std::uint64_t>());
  if (j.contains("error")) {
    s.error = j["error"].get<double>();
    s.source = popstats::error_source_from_string(j.value("source", std::string("ingested")));
  }
  if (j.contains("epochs")) s.epochs = j["epochs"].get<int>();
  return s;
}

}  // namespace

void write_population(const PopulationFile& pop, std::ostream& out) {
  nlohmann::ordered_json h;
  h["format"] = pop.header.format;
  h["design_space"] = pop.header.design_space;
  h["master_seed"] = pop.header.master_seed;
  h["population_size"] = pop.header.population_size;
  h["flops_lo"] = pop.header.flops_lo;
  h["flops_hi"] = pop.header.flops_hi;
  h["manifest"] = pop.header.manifest_json.empty()
                      ? nlohmann::ordered_json::object()
                      : nlohmann::ordered_json::parse(pop.header.manifest_json);
  out << h.dump() << '\n';
  for (const auto& r : pop.records) out << record_to_json(r).dump() << '\n';
}

void write_population_file(const PopulationFile& pop, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_population(pop, out);
}

PopulationFile read_population(std::istream& in) {
  PopulationFile pop;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty population file");
  // ordered parse keeps the embedded manifest's key order byte-stable
  const auto h = nlohmann::ordered_json::parse(line);
  pop.header.format = h.at("format").get<std::string>();
  if (pop.header.format != kPopulationFormat)
    throw std::runtime_error("unsupported population format: " + pop.header.format);
  pop.header.design_space = h.value("design_space", std::string());
  pop.header.master_seed = h.value("master_seed", std::uint64_t{0});
  pop.header.population_size = h.value("population_size", 0);
  pop.header.flops_lo = h.value("flops_lo", 0.0);
  pop.header.flops_hi = h.value("flops_hi", 0.0);
  if (h.contains("manifest")) pop.header.manifest_json = h["manifest"].dump();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    pop.records.push_back(record_from_json(nlohmann::json::parse(line)));
  }
  return pop;
}

PopulationFile read_population_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open population file: " + path);
  return read_population(in);
}

std::vector<std::string> verify_population(const PopulationFile& pop) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < pop.records.size(); ++i) {
    const auto& r = pop.records[i];
    if (spec_hash(r.spec) != r.spec_hash)
      problems.push_back("record " + std::to_string(i) + ": spec hash mismatch");
    const auto cx = complexity::network_metrics(r.spec);
    if (std::llround(cx.flops) != std::llround(r.complexity.flops) ||
        std::llround(cx.params) != std::llround(r.complexity.params) ||
        std::llround(cx.acts) != std::llround(r.complexity.acts))
      problems.push_back("record " + std::to_string(i) + ": stored complexity not recomputable");
    if (r.error && (*r.error < 0 || *r.error > 1))
      problems.push_back("record " + std::to_string(i) + ": error outside [0, 1]");
  }
  return problems;
}

std::vector<ErrorRecord> read_error_records(std::istream& in) {
  std::vector<ErrorRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '{') {
      const auto j = nlohmann::json::parse(line);
      ErrorRecord r;
      r.spec_hash = j.at("spec_hash").get<std::string>();
      r.error = j.at("error").get<double>();
      if (j.contains("epochs")) r.epochs = j["epochs"].get<int>();
      if (j.contains("metadata")) r.metadata_json = j["metadata"].dump();
      out.push_back(std::move(r));
    } else {
      // CSV: spec_hash,error. Skip a header line if present.
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::runtime_error("bad error record line: " + line);
      const std::string first = line.substr(0, comma);
      if (first == "spec_hash") continue;
      ErrorRecord r;
      r.spec_hash = first;
      r.error = std::stod(line.substr(comma + 1));
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<ErrorRecord> read_error_records_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open error file: " + path);
  return read_error_records(in);
}

IngestReport ingest_errors(PopulationFile& pop, std::span<const ErrorRecord> records,
                           std::optional<int> expected_epochs) {
  IngestReport report;
  std::unordered_map<std::string, std::size_t> by_hash;
  for (std::size_t i = 0; i < pop.records.size(); ++i) by_hash[pop.records[i].spec_hash] = i;

  auto mismatch = [&](const std::optional<int>& epochs) {
    if (!expected_epochs || !epochs) return 0.0;
    return std::fabs(static_cast<double>(*epochs - *expected_epochs));
  };

  for (const auto& rec : records) {
    if (rec.error < 0 || rec.error > 1)
      throw std::invalid_argument("error outside [0, 1] for " + rec.spec_hash);
    const auto it = by_hash.find(rec.spec_hash);
    if (it == by_hash.end()) {
      report.orphans.push_back(rec.spec_hash);
      continue;
    }
    auto& sample = pop.records[it->second];
    if (sample.error && sample.source == popstats::ErrorSource::Ingested) {
      if (*sample.error == rec.error && sample.epochs == rec.epochs) continue;  // plain duplicate
      const bool replace = mismatch(rec.epochs) < mismatch(sample.epochs);
      report.conflicts.push_back({rec.spec_hash, replace ? rec.error : *sample.error,
                                  replace ? *sample.error : rec.error});
      if (!replace) continue;
    } else {
      ++report.matched;
    }
    sample.error = rec.error;
    sample.source = popstats::ErrorSource::Ingested;
    sample.epochs = rec.epochs;
  }
  for (const auto& s : pop.records)
    if (!s.error) ++report.pending;
  return report;
}

double surrogate_error(const netspec::AnyNetSpec& spec, std::uint64_t noise_seed,
                       const SurrogateConfig& cfg) {
  const auto cx = complexity::network_metrics(spec);
  double e = cfg.base_error - cfg.flop_slope * std::log10(cx.flops / 400e6);

  if (cfg.w_fit != 0) {
    const auto widths = netspec::per_block_widths(spec);
    const auto fit = quantlin::fit_linear(widths, cfg.fit_grid);
    e += cfg.w_fit * std::min(fit.e_fit, cfg.fit_clip);
  }
  if (cfg.w_bottleneck != 0) {
    for (const auto& st : spec.stages)
      if (st.bottleneck != 1.0) {
        e += cfg.w_bottleneck;
        break;
      }
  }
  if (cfg.w_nonmono != 0 && spec.stages.size() > 1) {
    int inversions = 0;
    for (std::size_t i = 1; i < spec.stages.size(); ++i) {
      if (spec.stages[i].width < spec.stages[i - 1].width) ++inversions;
      if (spec.stages[i].depth < spec.stages[i - 1].depth) ++inversions;
    }
    e += cfg.w_nonmono * inversions / static_cast<double>(spec.stages.size() - 1);
  }

  rng::SplitMix64 g{rng::derive_seed(spec_hash_value(spec), noise_seed)};
  e += (rng::u01(g) - 0.5) * cfg.noise_width;
  return std::min(0.95, std::max(0.05, e));
}

int apply_surrogate(PopulationFile& pop, std::uint64_t noise_seed, const SurrogateConfig& cfg,
                    bool overwrite) {
  int applied = 0;
  for (auto& s : pop.records) {
    if (s.error && !overwrite) continue;
    s.error = surrogate_error(s.spec, noise_seed, cfg);
    s.source = popstats::ErrorSource::Surrogate;
    s.epochs.reset();
    ++applied;
  }
  return applied;
}

}  // namespace dsd::evalstore
