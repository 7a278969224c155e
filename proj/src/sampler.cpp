#include "dsd/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "dsd/complexity.hpp"
#include "dsd/evalstore.hpp"
#include "dsd/quantlin.hpp"
#include "dsd/rng.hpp"

namespace dsd::sampler {

namespace {

int log_uniform_int(rng::SplitMix64& g, int lo, int hi) {
  if (lo == hi) return lo;
  const double v = rng::log_uniform(g, lo, hi);
  const int snapped = static_cast<int>(std::floor(v + 0.5));
  return std::clamp(snapped, lo, hi);
}

int log_uniform_width(rng::SplitMix64& g, int lo, int hi, int multiple) {
  const double v = rng::log_uniform(g, lo, hi);
  const int snapped = netspec::round_to_multiple(v, multiple);
  return std::clamp(snapped, lo, hi);
}

// Nearest grid value to a log-uniform draw over the grid span, ties upward.
template <typename T>
T log_uniform_grid(rng::SplitMix64& g, const std::vector<T>& values) {
  if (values.size() == 1) return values.front();
  const double v = rng::log_uniform(g, static_cast<double>(values.front()),
                                    static_cast<double>(values.back()));
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end()) return values.back();
  if (it == values.begin()) return values.front();
  const double up = static_cast<double>(*it);
  const double down = static_cast<double>(*(it - 1));
  return (up - v < v - down) || (up - v == v - down) ? *it : *(it - 1);
}

bool needs_complexity_context(const netspec::DesignSpaceDef& def) {
  return def.has_constraint(netspec::ConstraintKind::ParamCap) ||
         def.has_constraint(netspec::ConstraintKind::ActCap);
}

netspec::ConstraintContext make_context(const netspec::DesignSpaceDef& def,
                                        const netspec::AnyNetSpec& spec, bool from_generator,
                                        std::optional<double> wm) {
  netspec::ConstraintContext ctx;
  ctx.from_width_generator = from_generator;
  ctx.width_multiplier = wm;
  if (needs_complexity_context(def)) {
    const auto cx = complexity::network_metrics(spec);
    ctx.flops = cx.flops;
    ctx.params = cx.params;
    ctx.acts = cx.acts;
  }
  return ctx;
}

}  // namespace

netspec::AnyNetSpec sample_anynet(const netspec::DesignSpaceDef& def, std::uint64_t seed,
                                  int max_attempts) {
  if (def.kind != netspec::SpaceKind::AnyNet)
    throw std::invalid_argument("sample_anynet needs an AnyNet-kind def");
  const auto& lim = def.anynet.limits;
  if (lim.bottleneck_ratios.empty() || lim.group_widths.empty())
    throw std::invalid_argument("empty sampling domain");
  const bool shared_b = def.has_constraint(netspec::ConstraintKind::SharedBottleneck) ||
                        def.has_constraint(netspec::ConstraintKind::UnitBottleneck);
  const bool shared_g = def.has_constraint(netspec::ConstraintKind::SharedGroupWidth);

  rng::SplitMix64 g{seed};
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    netspec::AnyNetSpec spec;
    spec.block_type = def.block_type;
    spec.resolution = def.resolution;
    spec.stem_width = def.stem_width;
    spec.num_classes = def.num_classes;

    // Draw order is fixed: shared parameters, then per-stage (d, w, b, g).
    const double b_shared =
        shared_b ? rng::pick<double>(g, lim.bottleneck_ratios) : 0.0;
    const int g_shared = shared_g ? rng::pick<int>(g, lim.group_widths) : 0;
    for (int i = 0; i < def.anynet.num_stages; ++i) {
      netspec::StageSpec st;
      st.depth = log_uniform_int(g, lim.min_depth, lim.max_depth);
      st.width = log_uniform_width(g, lim.min_width, lim.max_width, lim.width_multiple);
      st.bottleneck = shared_b ? b_shared : rng::pick<double>(g, lim.bottleneck_ratios);
      st.group_width = shared_g ? g_shared : rng::pick<int>(g, lim.group_widths);
      st.group_width = netspec::apply_group_compat(netspec::inner_width_raw(st),
                                                   st.group_width).group_width;
      spec.stages.push_back(st);
    }

    const auto ctx = make_context(def, spec, false, std::nullopt);
    if (!netspec::check_constraints(spec, def, ctx).pass()) continue;
    return spec;
  }
  throw InfeasibleError("no valid spec from '" + def.name + "' after " +
                        std::to_string(max_attempts) + " attempts");
}

RegNetDraw sample_regnet(const netspec::DesignSpaceDef& def, std::uint64_t seed,
                         int max_attempts) {
  if (def.kind != netspec::SpaceKind::RegNet)
    throw std::invalid_argument("sample_regnet needs a RegNet-kind def");
  const auto& rr = def.regnet;
  if (rr.w0_values.empty() || rr.wa_values.empty() || rr.wm_hundredths.empty() ||
      rr.bottleneck_ratios.empty() || rr.group_widths.empty())
    throw std::invalid_argument("empty sampling domain");

  rng::SplitMix64 g{seed};
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    netspec::RegNetParams params;
    params.depth = log_uniform_int(g, rr.depth_min, rr.depth_max);
    params.w0 = log_uniform_grid(g, rr.w0_values);
    params.wa = log_uniform_grid(g, rr.wa_values);
    params.wm = log_uniform_grid(g, rr.wm_hundredths) / 100.0;
    params.bottleneck = rng::pick<double>(g, rr.bottleneck_ratios);
    params.group_width = rng::pick<int>(g, rr.group_widths);
    params.block_type = def.block_type;
    params.resolution = def.resolution;

    const auto profile =
        quantlin::gen_block_widths(params.depth, params.w0, params.wa, params.wm);
    const auto stages = quantlin::to_stages(profile, rr.width_multiple, rr.num_stages);
    if (!stages) continue;

    netspec::AnyNetSpec spec;
    spec.block_type = def.block_type;
    spec.resolution = def.resolution;
    spec.stem_width = def.stem_width;
    spec.num_classes = def.num_classes;
    for (const auto& st : *stages) {
      netspec::StageSpec s;
      s.depth = st.depth;
      s.width = static_cast<int>(std::llround(st.width));
      s.bottleneck = params.bottleneck;
      s.group_width = params.group_width;
      s.group_width =
          netspec::apply_group_compat(netspec::inner_width_raw(s), s.group_width).group_width;
      spec.stages.push_back(s);
    }

    const auto ctx = make_context(def, spec, true, params.wm);
    if (!netspec::check_constraints(spec, def, ctx).pass()) continue;
    return {params, spec};
  }
  throw InfeasibleError("no valid spec from '" + def.name + "' after " +
                        std::to_string(max_attempts) + " attempts");
}

std::vector<popstats::PopulationSample> sample_population(const SamplerConfig& cfg) {
  if (cfg.population_size < 1) throw std::invalid_argument("population size must be >= 1");
  if (!(cfg.flops_lo < cfg.flops_hi)) throw std::invalid_argument("flop window needs lo < hi");
  const int workers = std::max(1, cfg.workers);

  std::vector<popstats::PopulationSample> out(cfg.population_size);
  std::vector<std::string> failures(workers);

  auto run = [&](int worker) {
    try {
      for (int i = worker; i < cfg.population_size; i += workers) {
        const std::uint64_t child =
            rng::derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
        bool accepted = false;
        for (int attempt = 0; attempt < cfg.max_attempts_per_sample; ++attempt) {
          const std::uint64_t s = rng::derive_seed(child, static_cast<std::uint64_t>(attempt));
          popstats::PopulationSample sample;
          if (cfg.space.kind == netspec::SpaceKind::AnyNet) {
            sample.spec = sample_anynet(cfg.space, s);
          } else {
            auto draw = sample_regnet(cfg.space, s);
            sample.spec = std::move(draw.spec);
            sample.regnet_params = draw.params;
          }
          const auto cx = complexity::network_metrics(sample.spec);
          if (cx.flops < cfg.flops_lo || cx.flops > cfg.flops_hi) continue;
          sample.complexity = cx;
          sample.spec_hash = evalstore::spec_hash(sample.spec);
          out[i] = std::move(sample);
          accepted = true;
          break;
        }
        if (!accepted)
          throw InfeasibleError("sample " + std::to_string(i) + " found no spec in [" +
                                std::to_string(cfg.flops_lo) + ", " +
                                std::to_string(cfg.flops_hi) + "] flops after " +
                                std::to_string(cfg.max_attempts_per_sample) + " attempts");
      }
    } catch (const std::exception& e) {
      failures[worker] = e.what();
    }
  };

  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& f : failures)
    if (!f.empty()) throw InfeasibleError(f);
  return out;
}

double design_space_size(const netspec::DesignSpaceDef& def) {
  const double nb = def.kind == netspec::SpaceKind::AnyNet
                        ? static_cast<double>(def.anynet.limits.bottleneck_ratios.size())
                        : static_cast<double>(def.regnet.bottleneck_ratios.size());
  const double ng = def.kind == netspec::SpaceKind::AnyNet
                        ? static_cast<double>(def.anynet.limits.group_widths.size())
                        : static_cast<double>(def.regnet.group_widths.size());
  if (def.kind == netspec::SpaceKind::RegNet) {
    // Four continuous generator parameters at 64 quantization levels each.
    return std::pow(64.0, 4) * nb * ng;
  }
  const auto& lim = def.anynet.limits;
  const double nd = lim.max_depth - lim.min_depth + 1;
  const double nw = (lim.max_width - lim.min_width) / lim.width_multiple + 1;
  const int stages = def.anynet.num_stages;
  const bool shared_b = def.has_constraint(netspec::ConstraintKind::SharedBottleneck);
  const bool shared_g = def.has_constraint(netspec::ConstraintKind::SharedGroupWidth);

  double per_stage = nd * nw * (shared_b ? 1 : nb) * (shared_g ? 1 : ng);
  double size = std::pow(per_stage, stages) * (shared_b ? nb : 1) * (shared_g ? ng : 1);

  double factorial = 1;
  for (int i = 2; i <= stages; ++i) factorial *= i;
  if (def.has_constraint(netspec::ConstraintKind::IncreasingWidths)) size /= factorial;
  if (def.has_constraint(netspec::ConstraintKind::IncreasingDepths)) size /= factorial;
  return size;
}

std::vector<std::string> preset_names() {
  return {"anynetx-a", "anynetx-b", "anynetx-c", "anynetx-d", "anynetx-e",
          "regnet",    "regnetx-constrained"};
}

netspec::DesignSpaceDef preset(const std::string& name) {
  using netspec::ConstraintKind;
  netspec::DesignSpaceDef def;
  def.name = name;

  auto add = [&def](ConstraintKind k, double lo = 0, double hi = 0, double value = 0) {
    def.constraints.push_back({k, lo, hi, value});
  };

  if (name == "anynetx-a" || name == "anynetx-b" || name == "anynetx-c" ||
      name == "anynetx-d" || name == "anynetx-e") {
    def.kind = netspec::SpaceKind::AnyNet;
    const char variant = name.back();
    if (variant >= 'b') add(ConstraintKind::SharedBottleneck);
    if (variant >= 'c') add(ConstraintKind::SharedGroupWidth);
    if (variant >= 'd') add(ConstraintKind::IncreasingWidths);
    if (variant >= 'e') add(ConstraintKind::IncreasingDepths);
    return def;
  }
  if (name == "regnet") {
    def.kind = netspec::SpaceKind::RegNet;
    def.regnet = netspec::RegNetRanges::defaults();
    add(ConstraintKind::SharedBottleneck);
    add(ConstraintKind::SharedGroupWidth);
    add(ConstraintKind::RegNetLinear);
    return def;
  }
  if (name == "regnetx-constrained") {
    def.kind = netspec::SpaceKind::RegNet;
    def.regnet = netspec::RegNetRanges::defaults();
    def.regnet.depth_min = 12;
    def.regnet.depth_max = 28;
    def.regnet.bottleneck_ratios = {1};
    std::erase_if(def.regnet.wm_hundredths, [](int h) { return h < 200; });
    add(ConstraintKind::SharedBottleneck);
    add(ConstraintKind::SharedGroupWidth);
    add(ConstraintKind::RegNetLinear);
    add(ConstraintKind::UnitBottleneck);
    add(ConstraintKind::WidthMultFloor, 0, 0, 2.0);
    add(ConstraintKind::DepthWindow, 12, 28);
    return def;
  }
  throw std::invalid_argument("unknown design space preset: " + name);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

netspec::Constraint parse_constraint(const std::string& token) {
  using netspec::ConstraintKind;
  const auto parts = split(token, ':');
  const std::string& kind = parts[0];
  netspec::Constraint c{};
  if (kind == "shared_b") c.kind = ConstraintKind::SharedBottleneck;
  else if (kind == "shared_g") c.kind = ConstraintKind::SharedGroupWidth;
  else if (kind == "increasing_w") c.kind = ConstraintKind::IncreasingWidths;
  else if (kind == "increasing_d") c.kind = ConstraintKind::IncreasingDepths;
  else if (kind == "regnet_linear") c.kind = ConstraintKind::RegNetLinear;
  else if (kind == "b_fixed") c.kind = ConstraintKind::UnitBottleneck;
  else if (kind == "depth_window") {
    c.kind = ConstraintKind::DepthWindow;
    if (parts.size() != 3) throw std::invalid_argument("depth_window needs lo:hi");
    c.lo = std::stod(parts[1]);
    c.hi = std::stod(parts[2]);
  } else if (kind == "wm_floor") {
    c.kind = ConstraintKind::WidthMultFloor;
    if (parts.size() != 2) throw std::invalid_argument("wm_floor needs a value");
    c.value = std::stod(parts[1]);
  } else if (kind == "param_cap") {
    c.kind = ConstraintKind::ParamCap;
    if (parts.size() != 2) throw std::invalid_argument("param_cap needs a coefficient");
    c.value = std::stod(parts[1]);
  } else if (kind == "act_cap") {
    c.kind = ConstraintKind::ActCap;
    if (parts.size() != 2) throw std::invalid_argument("act_cap needs a coefficient");
    c.value = std::stod(parts[1]);
  } else {
    throw std::invalid_argument("unknown constraint: " + kind);
  }
  return c;
}

}  // namespace

netspec::DesignSpaceDef load_design_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open design space config: " + path);

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  netspec::DesignSpaceDef def;
  const auto kind_it = kv.find("kind");
  def.kind = (kind_it != kv.end() && kind_it->second == "regnet") ? netspec::SpaceKind::RegNet
                                                                  : netspec::SpaceKind::AnyNet;
  if (def.kind == netspec::SpaceKind::RegNet) def.regnet = netspec::RegNetRanges::defaults();

  auto geti = [&kv](const std::string& key, int fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoi(it->second);
  };
  auto getd = [&kv](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
  };

  def.name = kv.count("name") ? kv["name"] : "custom";
  if (kv.count("block_type")) def.block_type = netspec::block_type_from_string(kv["block_type"]);
  def.resolution = geti("resolution", def.resolution);
  def.stem_width = geti("stem_width", def.stem_width);
  def.num_classes = geti("num_classes", def.num_classes);

  const int stages = geti("stages", 4);
  def.anynet.num_stages = stages;
  def.regnet.num_stages = stages;

  if (def.kind == netspec::SpaceKind::AnyNet) {
    auto& lim = def.anynet.limits;
    lim.min_depth = geti("depth_min", lim.min_depth);
    lim.max_depth = geti("depth_max", lim.max_depth);
    lim.min_width = geti("width_min", lim.min_width);
    lim.max_width = geti("width_max", lim.max_width);
    lim.width_multiple = geti("width_multiple", lim.width_multiple);
    if (kv.count("bottleneck_ratios")) {
      lim.bottleneck_ratios.clear();
      for (const auto& t : split(kv["bottleneck_ratios"], ',')) lim.bottleneck_ratios.push_back(std::stod(t));
    }
    if (kv.count("group_widths")) {
      lim.group_widths.clear();
      for (const auto& t : split(kv["group_widths"], ',')) lim.group_widths.push_back(std::stoi(t));
    }
  } else {
    auto& rr = def.regnet;
    rr.depth_min = geti("depth_min", rr.depth_min);
    rr.depth_max = geti("depth_max", rr.depth_max);
    rr.width_multiple = geti("width_multiple", rr.width_multiple);
    const double w0_lo = getd("w0_min", rr.w0_values.front());
    const double w0_hi = getd("w0_max", rr.w0_values.back());
    std::erase_if(rr.w0_values, [&](double v) { return v < w0_lo || v > w0_hi; });
    const double wa_lo = getd("wa_min", rr.wa_values.front());
    const double wa_hi = getd("wa_max", rr.wa_values.back());
    std::erase_if(rr.wa_values, [&](double v) { return v < wa_lo || v > wa_hi; });
    const int wm_lo = static_cast<int>(std::llround(getd("wm_min", 1.5) * 100));
    const int wm_hi = static_cast<int>(std::llround(getd("wm_max", 3.0) * 100));
    std::erase_if(rr.wm_hundredths, [&](int h) { return h < wm_lo || h > wm_hi; });
    if (kv.count("bottleneck_ratios")) {
      rr.bottleneck_ratios.clear();
      for (const auto& t : split(kv["bottleneck_ratios"], ',')) rr.bottleneck_ratios.push_back(std::stod(t));
    }
    if (kv.count("group_widths")) {
      rr.group_widths.clear();
      for (const auto& t : split(kv["group_widths"], ',')) rr.group_widths.push_back(std::stoi(t));
    }
  }

  if (kv.count("constraints"))
    for (const auto& t : split(kv["constraints"], ','))
      def.constraints.push_back(parse_constraint(trim(t)));

  if (kv.count("flops_lo") || kv.count("flops_hi"))
    def.flop_window = {getd("flops_lo", 0.0), getd("flops_hi", 0.0)};
  return def;
}

}  // namespace dsd::sampler
