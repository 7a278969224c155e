#include <functional>
#include "dsd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dsd/complexity.hpp"
#include "dsd/evalstore.hpp"
#include "dsd/popstats.hpp"
#include "dsd/quantlin.hpp"
#include "dsd/sampler.hpp"

namespace dsd::cli {

namespace fs = std::filesystem;

namespace {

std::string manifest_json(const std::string& command, std::uint64_t seed,
                          const std::string& config, const std::vector<std::string>& inputs,
                          const std::vector<std::string>& outputs) {
  nlohmann::ordered_json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["config"] = config;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  return m.dump();
}

// CSV writer that leads with the manifest as a '#' comment line.
std::ofstream open_csv(const fs::path& path, const std::string& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "# " << manifest << '\n';
  return out;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

std::string fmt_flops(double flops) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  if (flops >= 1e9) {
    ss.precision(2);
    ss << flops / 1e9 << "GF";
  } else {
    ss.precision(1);
    ss << flops / 1e6 << "MF";
  }
  return ss.str();
}

netspec::DesignSpaceDef resolve_space(const SpaceSelection& sel) {
  netspec::DesignSpaceDef def;
  if (!sel.config.empty()) {
    def = sampler::load_design_space(sel.config);
  } else if (!sel.space.empty()) {
    def = sampler::preset(sel.space);
  } else {
    throw std::invalid_argument("either --space or --config is required");
  }
  if (!sel.block_type.empty()) def.block_type = netspec::block_type_from_string(sel.block_type);
  if (sel.stages > 0) {
    def.anynet.num_stages = sel.stages;
    def.regnet.num_stages = sel.stages;
  }
  if (sel.resolution > 0) def.resolution = sel.resolution;
  return def;
}

std::pair<double, double> parse_flop_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("flop window must be lo:hi, got '" + text + "'");
  const double lo = std::stod(text.substr(0, colon));
  const double hi = std::stod(text.substr(colon + 1));
  if (!(lo > 0 && lo < hi)) throw std::invalid_argument("flop window needs 0 < lo < hi");
  return {lo, hi};
}

evalstore::PopulationFile load_population_checked(const std::string& path) {
  if (!fs::exists(path)) throw std::system_error(ENOENT, std::generic_category(), path);
  return evalstore::read_population_file(path);
}

// Widths a model's linear fit is computed on: the generator's exact block
// widths when the sample carries generator parameters, the per-stage widths
// otherwise.
std::vector<double> fit_widths(const popstats::PopulationSample& s) {
  if (s.regnet_params) {
    const auto& p = *s.regnet_params;
    return quantlin::gen_block_widths(p.depth, p.w0, p.wa, p.wm).w;
  }
  return netspec::per_block_widths(s.spec);
}

int run_guarded(const std::string& command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const sampler::InfeasibleError& e) {
    std::cerr << command << ": infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::system_error& e) {
    std::cerr << command << ": missing input: " << e.what() << '\n';
    return kMissingInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << command << ": config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << command << ": error: " << e.what() << '\n';
    return kInternalError;
  }
}

struct LabeledPopulation {
  std::string label;
  evalstore::PopulationFile pop;
  std::vector<double> errors;  // complete samples only
};

std::vector<LabeledPopulation> load_labeled(const std::vector<std::string>& paths) {
  std::vector<LabeledPopulation> out;
  std::set<std::string> seen;
  for (const auto& path : paths) {
    LabeledPopulation lp;
    lp.pop = load_population_checked(path);
    lp.label = lp.pop.header.design_space.empty() ? fs::path(path).stem().string()
                                                  : lp.pop.header.design_space;
    while (seen.count(lp.label)) lp.label += "+";
    seen.insert(lp.label);
    for (const auto& r : lp.pop.records)
      if (r.error) lp.errors.push_back(*r.error);
    out.push_back(std::move(lp));
  }
  return out;
}

void write_edf_csv(std::ofstream& out, const std::vector<LabeledPopulation>& pops) {
  out << "space,error,frac_below,frac_at_or_below\n";
  for (const auto& lp : pops) {
    if (lp.errors.empty()) continue;
    const popstats::Edf F(lp.errors);
    const auto& sorted = F.sorted();
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (i > 0 && sorted[i] == sorted[i - 1]) continue;
      std::size_t at_or_below = i + 1;
      while (at_or_below < sorted.size() && sorted[at_or_below] == sorted[i]) ++at_or_below;
      out << lp.label << ',' << fmt(sorted[i]) << ',' << fmt(F(sorted[i])) << ','
          << fmt(at_or_below / n) << '\n';
    }
  }
}

void write_edf_svg(const fs::path& path, const std::vector<LabeledPopulation>& pops) {
  const int W = 640, H = 420, ML = 60, MR = 20, MT = 20, MB = 40;
  double lo = 1e9, hi = -1e9;
  for (const auto& lp : pops) {
    if (lp.errors.empty()) continue;
    lo = std::min(lo, *std::min_element(lp.errors.begin(), lp.errors.end()));
    hi = std::max(hi, *std::max_element(lp.errors.begin(), lp.errors.end()));
  }
  if (hi <= lo) hi = lo + 1e-6;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
  std::ofstream out(path, std::ios::binary);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  auto X = [&](double e) { return ML + (e - lo) / (hi - lo) * (W - ML - MR); };
  auto Y = [&](double f) { return H - MB - f * (H - MT - MB); };
  out << "<line x1='" << ML << "' y1='" << Y(0) << "' x2='" << W - MR << "' y2='" << Y(0)
      << "' stroke='black'/>\n";
  out << "<line x1='" << ML << "' y1='" << Y(0) << "' x2='" << ML << "' y2='" << Y(1)
      << "' stroke='black'/>\n";
  int ci = 0;
  for (const auto& lp : pops) {
    if (lp.errors.empty()) continue;
    const popstats::Edf F(lp.errors);
    std::ostringstream pts;
    pts << X(lo) << ',' << Y(0) << ' ';
    for (double e : F.sorted()) {
      pts << X(e) << ',' << Y(F(e)) << ' ';
      pts << X(e) << ',' << Y(F(std::nextafter(e, 1e9))) << ' ';
    }
    pts << X(hi) << ',' << Y(1);
    out << "<polyline fill='none' stroke='" << colors[ci % 5] << "' points='" << pts.str()
        << "'/>\n";
    out << "<text x='" << ML + 8 << "' y='" << MT + 16 + 16 * ci << "' fill='"
        << colors[ci % 5] << "' font-size='13'>" << lp.label << "</text>\n";
    ++ci;
  }
  out << "<text x='" << (W / 2) << "' y='" << H - 8 << "' font-size='13'>error</text>\n";
  out << "</svg>\n";
}

}  // namespace

int cmd_sample(const SampleArgs& args) {
  return run_guarded("sample", [&]() -> int {
    auto def = resolve_space(args.space);
    sampler::SamplerConfig cfg;
    cfg.space = def;
    if (!args.flops.empty()) {
      std::tie(cfg.flops_lo, cfg.flops_hi) = parse_flop_window(args.flops);
    } else if (def.flop_window) {
      std::tie(cfg.flops_lo, cfg.flops_hi) = *def.flop_window;
    }
    cfg.population_size = args.n;
    cfg.master_seed = args.seed;
    cfg.workers = args.workers;
    cfg.max_attempts_per_sample = args.max_attempts;

    evalstore::PopulationFile pop;
    pop.header.design_space = def.name;
    pop.header.master_seed = cfg.master_seed;
    pop.header.population_size = cfg.population_size;
    pop.header.flops_lo = cfg.flops_lo;
    pop.header.flops_hi = cfg.flops_hi;
    pop.header.manifest_json =
        manifest_json("sample", args.seed, args.space.config, {}, {args.out});
    pop.records = sampler::sample_population(cfg);
    evalstore::write_population_file(pop, args.out);
    std::cout << "wrote " << pop.records.size() << " samples from " << def.name << " in ["
              << fmt_flops(cfg.flops_lo) << ", " << fmt_flops(cfg.flops_hi) << "] to "
              << args.out << '\n';
    return kOk;
  });
}

int cmd_complexity(const ComplexityArgs& args) {
  return run_guarded("complexity", [&]() -> int {
    netspec::AnyNetSpec spec;
    if (!args.builtin.empty()) {
      if (args.builtin == "resnet-50") {
        spec = netspec::resnet50_spec();
      } else {
        throw std::invalid_argument("unknown builtin: " + args.builtin);
      }
    } else if (!args.spec_path.empty()) {
      if (!fs::exists(args.spec_path))
        throw std::system_error(ENOENT, std::generic_category(), args.spec_path);
      std::ifstream in(args.spec_path, std::ios::binary);
      std::stringstream buf;
      buf << in.rdbuf();
      spec = netspec::spec_from_json(buf.str());
    } else {
      throw std::invalid_argument("either --spec or --builtin is required");
    }
    const auto bd = complexity::network_breakdown(spec);
    auto cx = bd.total();
    if (!args.runtime_coeffs.empty()) {
      const auto first = args.runtime_coeffs.find(':');
      const auto second = args.runtime_coeffs.find(':', first + 1);
      if (first == std::string::npos || second == std::string::npos)
        throw std::invalid_argument("runtime coefficients must be a:b:c");
      const std::array<double, 3> coeffs{
          std::stod(args.runtime_coeffs.substr(0, first)),
          std::stod(args.runtime_coeffs.substr(first + 1, second - first - 1)),
          std::stod(args.runtime_coeffs.substr(second + 1))};
      cx.runtime_est = complexity::runtime_model(cx.flops, cx.acts, coeffs);
    }
    if (args.as_json) {
      nlohmann::ordered_json j;
      j["spec_hash"] = evalstore::spec_hash(spec);
      j["flops"] = static_cast<std::uint64_t>(std::llround(cx.flops));
      j["params"] = static_cast<std::uint64_t>(std::llround(cx.params));
      j["acts"] = static_cast<std::uint64_t>(std::llround(cx.acts));
      if (cx.runtime_est) j["runtime_est"] = *cx.runtime_est;
      std::cout << j.dump() << '\n';
    } else {
      std::cout << "spec " << evalstore::spec_hash(spec) << '\n';
      std::cout << "  flops  " << fmt_flops(cx.flops) << " (" << fmt(cx.flops) << ")\n";
      std::cout << "  params " << cx.params / 1e6 << "M\n";
      std::cout << "  acts   " << cx.acts / 1e6 << "M\n";
      std::cout << "  stem/body/head flops " << fmt_flops(bd.stem.flops) << " / "
                << fmt_flops(bd.body.flops) << " / " << fmt_flops(bd.head.flops) << '\n';
      if (cx.runtime_est) std::cout << "  runtime " << *cx.runtime_est << " (modeled)\n";
    }
    return kOk;
  });
}

int cmd_fit(const FitArgs& args) {
  return run_guarded("fit", [&]() -> int {
    const auto pop = load_population_checked(args.population);
    auto out = open_csv(args.out,
                        manifest_json("fit", 0, "", {args.population}, {args.out}));
    out << "spec_hash,e_fit,w0,wa,wm,error\n";
    for (const auto& r : pop.records) {
      const auto widths = fit_widths(r);
      const auto fit = quantlin::fit_linear(widths);
      out << r.spec_hash << ',' << fmt(fit.e_fit) << ',' << fmt(fit.w0) << ',' << fmt(fit.wa)
          << ',' << fmt(fit.wm) << ',' << (r.error ? fmt(*r.error) : std::string()) << '\n';
    }
    std::cout << "wrote fits for " << pop.records.size() << " models to " << args.out << '\n';
    return kOk;
  });
}

int cmd_analyze(const AnalyzeArgs& args) {
  return run_guarded("analyze", [&]() -> int {
    std::vector<std::string> paths{args.population};
    paths.insert(paths.end(), args.compare.begin(), args.compare.end());
    auto pops = load_labeled(paths);

    int complete = 0;
    for (const auto& lp : pops) complete += static_cast<int>(lp.errors.size());
    if (complete == 0)
      throw std::system_error(ENOENT, std::generic_category(),
                              "no complete samples to analyze");

    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    const std::string manifest =
        manifest_json("analyze", args.seed, "", paths, {args.out_dir});

    {
      auto out = open_csv(dir / "edf.csv", manifest);
      write_edf_csv(out, pops);
    }
    {
      auto out = open_csv(dir / "summary.csv", manifest);
      out << "space,n,complete,min_error,mean_error\n";
      for (const auto& lp : pops) {
        out << lp.label << ',' << lp.pop.records.size() << ',' << lp.errors.size();
        if (lp.errors.empty()) {
          out << ",,\n";
        } else {
          const popstats::Edf F(lp.errors);
          out << ',' << fmt(F.min_error()) << ',' << fmt(F.mean_error()) << '\n';
        }
      }
    }
    {
      auto out = open_csv(dir / "bootstrap.csv", manifest);
      out << "space,parameter,bin_lo,bin_hi,count,ci_low,median,ci_high\n";
      for (const auto& lp : pops) {
        if (lp.errors.size() < 2) continue;
        double flo = 1e30, fhi = 0;
        bool all_regnet = true;
        for (const auto& r : lp.pop.records) {
          if (!r.error) continue;
          flo = std::min(flo, r.complexity.flops);
          fhi = std::max(fhi, r.complexity.flops);
          all_regnet = all_regnet && r.regnet_params.has_value();
        }
        std::vector<popstats::FlopBin> bins;
        if (args.bins <= 1 || fhi <= flo * (1 + 1e-9)) {
          bins.push_back({flo, fhi});
        } else {
          const double span = std::log10(fhi / flo);
          bins = popstats::log_flop_bins(flo, fhi * (1 + 1e-12),
                                         std::max(1, static_cast<int>(args.bins / span)));
        }
        std::vector<std::pair<std::string, popstats::ParamExtractor>> extractors = {
            {"depth", popstats::total_depth},
            {"w_last", popstats::last_stage_width},
            {"b", [](const popstats::PopulationSample& s) { return s.spec.stages.front().bottleneck; }},
            {"g", [](const popstats::PopulationSample& s) {
               int g = 0;
               for (const auto& st : s.spec.stages) g = std::max(g, st.group_width);
               return static_cast<double>(g);
             }},
        };
        if (all_regnet) {
          extractors.emplace_back("w0", [](const popstats::PopulationSample& s) {
            return s.regnet_params->w0;
          });
          extractors.emplace_back("wa", [](const popstats::PopulationSample& s) {
            return s.regnet_params->wa;
          });
          extractors.emplace_back("wm", [](const popstats::PopulationSample& s) {
            return s.regnet_params->wm;
          });
        }
        for (const auto& [name, fn] : extractors) {
          const auto bands =
              popstats::param_trends(lp.pop.records, fn, bins, args.seed);
          for (const auto& band : bands)
            out << lp.label << ',' << name << ',' << fmt(band.bin.lo) << ','
                << fmt(band.bin.hi) << ',' << band.count << ',' << fmt(band.best_range.ci_low)
                << ',' << fmt(band.best_range.median) << ',' << fmt(band.best_range.ci_high)
                << '\n';
        }
      }
    }
    {
      auto out = open_csv(dir / "trends.csv", manifest);
      out << "space,metric,model,a,b,c,rms_residual,points\n";
      for (const auto& lp : pops) {
        std::vector<popstats::TrendPoint> params_pts, acts_pts;
        for (const auto& r : lp.pop.records) {
          std::optional<double> err = r.error;
          params_pts.push_back({r.complexity.flops, r.complexity.params, err});
          acts_pts.push_back({r.complexity.flops, r.complexity.acts, err});
        }
        if (params_pts.size() < 2) continue;
        const bool frontier = !lp.errors.empty() &&
                              lp.errors.size() == lp.pop.records.size();
        const auto pfit =
            popstats::trend_fit(params_pts, popstats::TrendModel::Linear, frontier);
        const auto afit = popstats::trend_fit(acts_pts, popstats::TrendModel::Sqrt, frontier);
        out << lp.label << ",params,linear," << fmt(pfit.a) << ",0,0," << fmt(pfit.rms_residual)
            << ',' << pfit.points_used << '\n';
        out << lp.label << ",acts,sqrt,0," << fmt(afit.b) << ",0," << fmt(afit.rms_residual)
            << ',' << afit.points_used << '\n';
      }
    }

    {
      auto out = open_csv(dir / "efficiency.csv", manifest);
      out << "space,budget,expected_best_error,std_error\n";
      for (const auto& lp : pops) {
        if (lp.errors.size() < 2) continue;
        std::vector<int> budgets;
        for (int b = 1; b < static_cast<int>(lp.errors.size()); b *= 2) budgets.push_back(b);
        budgets.push_back(static_cast<int>(lp.errors.size()));
        const auto eff =
            popstats::random_search_efficiency(lp.errors, budgets, 2000, args.seed);
        for (const auto& point : eff)
          out << lp.label << ',' << point.budget << ',' << fmt(point.expected_best) << ','
              << fmt(point.std_error) << '\n';
      }
    }

    if (pops.size() > 1) {
      // Pairwise pointwise EDF dominance over the central 90% of the pooled
      // errors. Step functions only move at sample values, so checking at
      // every pooled value plus interval midpoints is exact.
      std::vector<double> pooled;
      for (const auto& lp : pops) pooled.insert(pooled.end(), lp.errors.begin(), lp.errors.end());
      std::sort(pooled.begin(), pooled.end());
      const double lo = popstats::quantile_sorted(pooled, 0.05);
      const double hi = popstats::quantile_sorted(pooled, 0.95);
      std::vector<double> points{lo, hi};
      for (double e : pooled)
        if (e >= lo && e <= hi) points.push_back(e);
      std::sort(points.begin(), points.end());
      points.erase(std::unique(points.begin(), points.end()), points.end());
      std::vector<double> eval = points;
      for (std::size_t i = 0; i + 1 < points.size(); ++i)
        eval.push_back((points[i] + points[i + 1]) / 2);

      auto out = open_csv(dir / "ordering.csv", manifest);
      out << "space_a,space_b,range_lo,range_hi,points_checked,frac_a_ge_b,dominates\n";
      std::cout << "EDF ordering over error range [" << fmt(lo) << ", " << fmt(hi) << "]:\n";
      for (std::size_t a = 0; a < pops.size(); ++a) {
        if (pops[a].errors.empty()) continue;
        const popstats::Edf Fa(pops[a].errors);
        for (std::size_t b = 0; b < pops.size(); ++b) {
          if (a == b || pops[b].errors.empty()) continue;
          const popstats::Edf Fb(pops[b].errors);
          int ge = 0;
          for (double e : eval)
            if (Fa(e) >= Fb(e)) ++ge;
          const bool dominates = ge == static_cast<int>(eval.size());
          out << pops[a].label << ',' << pops[b].label << ',' << fmt(lo) << ',' << fmt(hi)
              << ',' << eval.size() << ',' << fmt(ge / double(eval.size())) << ','
              << (dominates ? 1 : 0) << '\n';
          if (dominates)
            std::cout << "  " << pops[a].label << " >= " << pops[b].label << " pointwise\n";
        }
      }
    }

    if (args.svg) write_edf_svg(dir / "edf.svg", pops);
    std::cout << "analysis written to " << args.out_dir << '\n';
    return kOk;
  });
}

int cmd_best(const BestArgs& args) {
  return run_guarded("best", [&]() -> int {
    const auto pop = load_population_checked(args.population);
    std::vector<const popstats::PopulationSample*> complete;
    for (const auto& r : pop.records)
      if (r.error) complete.push_back(&r);
    if (static_cast<int>(complete.size()) < args.k)
      throw std::invalid_argument("k=" + std::to_string(args.k) + " but only " +
                                  std::to_string(complete.size()) + " complete samples");
    std::sort(complete.begin(), complete.end(),
              [](const popstats::PopulationSample* a, const popstats::PopulationSample* b) {
                if (*a->error != *b->error) return *a->error < *b->error;
                return a->spec_hash < b->spec_hash;  // deterministic tie-break
              });

    std::ostringstream table;
    table << "rank,spec_hash,error,flops,params_m,acts_m,depth,d,w0,wa,wm,b,g\n";
    for (int i = 0; i < args.k; ++i) {
      const auto& s = *complete[i];
      table << i + 1 << ',' << s.spec_hash << ',' << fmt(*s.error) << ','
            << fmt(s.complexity.flops) << ',' << fmt(s.complexity.params / 1e6) << ','
            << fmt(s.complexity.acts / 1e6) << ',' << fmt(popstats::total_depth(s));
      if (s.regnet_params) {
        const auto& p = *s.regnet_params;
        table << ',' << p.depth << ',' << fmt(p.w0) << ',' << fmt(p.wa) << ',' << fmt(p.wm)
              << ',' << fmt(p.bottleneck) << ',' << p.group_width;
      } else {
        table << ",,,,,,";
      }
      table << '\n';
    }
    std::cout << table.str();
    if (!args.out.empty()) {
      auto out = open_csv(args.out,
                          manifest_json("best", 0, "", {args.population}, {args.out}));
      out << table.str();
    }
    return kOk;
  });
}

int cmd_size(const SizeArgs& args) {
  return run_guarded("size", [&]() -> int {
    const auto def = resolve_space(args.space);
    const double size = sampler::design_space_size(def);
    std::ostringstream ss;
    ss.precision(4);
    ss << def.name << " " << size;
    std::cout << ss.str() << '\n';
    return kOk;
  });
}

int cmd_export(const ExportArgs& args) {
  return run_guarded("export", [&]() -> int {
    const auto pop = load_population_checked(args.population);
    fs::create_directories(args.out_dir);
    for (const auto& r : pop.records) {
      std::ofstream out(fs::path(args.out_dir) / (r.spec_hash + ".json"), std::ios::binary);
      out << netspec::canonical_json(r.spec) << '\n';
    }
    // Spec files must stay byte-canonical (they feed the hash), so the
    // manifest goes in a sidecar file.
    std::ofstream m(fs::path(args.out_dir) / "export_manifest.json", std::ios::binary);
    m << manifest_json("export", 0, "", {args.population}, {args.out_dir}) << '\n';
    std::cout << "exported " << pop.records.size() << " spec files to " << args.out_dir << '\n';
    return kOk;
  });
}

int cmd_surrogate(const SurrogateArgs& args) {
  return run_guarded("surrogate", [&]() -> int {
    auto pop = load_population_checked(args.population);
    const int applied = evalstore::apply_surrogate(pop, args.seed, {}, args.overwrite_existing);
    const std::string out = args.out.empty() ? args.population : args.out;
    pop.header.manifest_json =
        manifest_json("surrogate", args.seed, "", {args.population}, {out});
    evalstore::write_population_file(pop, out);
    std::cout << "surrogate errors for " << applied << " models written to " << out << '\n';
    return kOk;
  });
}

int cmd_ingest(const IngestArgs& args) {
  return run_guarded("ingest", [&]() -> int {
    auto pop = load_population_checked(args.population);
    if (!fs::exists(args.errors))
      throw std::system_error(ENOENT, std::generic_category(), args.errors);
    const auto records = evalstore::read_error_records_file(args.errors);
    const auto report = evalstore::ingest_errors(pop, records, args.expected_epochs);
    const std::string out = args.out.empty() ? args.population : args.out;
    pop.header.manifest_json =
        manifest_json("ingest", 0, "", {args.population, args.errors}, {out});
    evalstore::write_population_file(pop, out);
    std::cout << "matched " << report.matched << ", pending " << report.pending << '\n';
    for (const auto& o : report.orphans) std::cerr << "orphan error record: " << o << '\n';
    for (const auto& c : report.conflicts)
      std::cerr << "conflict for " << c.spec_hash << ": kept " << c.kept_error << ", dropped "
                << c.dropped_error << '\n';
    return kOk;
  });
}

}  // namespace dsd::cli
