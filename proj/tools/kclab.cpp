#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "kcl/cnf.hpp"
#include "kcl/dfa.hpp"
#include "kcl/dnnf.hpp"
#include "kcl/obdd.hpp"
#include "kcl/pathstruct.hpp"
#include "kcl/plots.hpp"
#include "kcl/sweep.hpp"

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::uint64_t node_cap = 5'000'000;
  std::uint64_t time_cap = 0;
  int jobs = 1;
  std::string out;
};

// Instance source shared by gen/compile/count: a DIMACS file or the random
// model.
struct SourceOpts {
  std::string in_path;
  int k = 3;
  int n = 20;
  double r = -1;
  long m = -1;
};

void add_source_flags(CLI::App* sub, SourceOpts& src) {
  sub->add_option("--in", src.in_path, "DIMACS input file");
  sub->add_option("--k", src.k, "clause length");
  sub->add_option("--n", src.n, "variable count");
  sub->add_option("--r", src.r, "clause ratio m/n");
  sub->add_option("--m", src.m, "clause count (overrides --r)");
}

kcl::CnfFormula read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  return kcl::parse_dimacs(in);
}

kcl::CnfFormula load_formula(const SourceOpts& src, std::uint64_t seed) {
  if (!src.in_path.empty()) return read_dimacs_file(src.in_path);
  if (src.m >= 0)
    return kcl::generate_instance(kcl::GenParams{src.k, src.n, src.m, seed});
  if (src.r >= 0)
    return kcl::generate_instance(
        kcl::GenParams::with_ratio(src.k, src.n, src.r, seed));
  throw std::invalid_argument("provide --in, or --k/--n with --r or --m");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

std::string compile_report(const kcl::CnfFormula& f, kcl::Language language,
                           const GlobalOpts& g) {
  kcl::SizeReport report;
  std::uint64_t models = 0;
  const bool countable = f.num_vars <= 62;
  switch (language) {
    case kcl::Language::Obdd: {
      kcl::ObddManager mgr(kcl::VarOrder(f.num_vars),
                           kcl::ObddLimits{g.node_cap, static_cast<double>(g.time_cap)});
      const auto root = mgr.compile_cnf(f);
      report = mgr.node_count(root);
      if (countable) models = mgr.model_count(root, f.num_vars);
      break;
    }
    case kcl::Language::Dfa: {
      const kcl::LevelDfa dfa =
          kcl::compile_cnf_to_dfa(f, kcl::ObddLimits{g.node_cap, static_cast<double>(g.time_cap)});
      report.nodes = kcl::dfa_state_count(dfa);
      for (const auto& level : dfa.levels)
        for (const kcl::DfaState& s : level)
          report.edges += (s.next[0] >= 0 ? 1 : 0) + (s.next[1] >= 0 ? 1 : 0);
      if (countable) models = kcl::accepting_path_count(dfa);
      break;
    }
    case kcl::Language::Dnnf: {
      kcl::DnnfDag dag;
      kcl::DnnfCompileOptions opts;
      opts.node_cap = g.node_cap;
      opts.time_cap_ms = g.time_cap;
      const auto root = kcl::compile_cnf_to_dnnf(f, dag, opts);
      report = kcl::dnnf_node_count(dag, root);
      if (countable) models = kcl::dnnf_model_count(dag, root, f.num_vars);
      break;
    }
  }
  std::ostringstream line;
  line << "language=" << kcl::to_string(language) << " nodes=" << report.nodes
       << " edges=" << report.edges << " models=";
  if (countable)
    line << models;
  else
    line << "na";
  line << '\n';
  return line.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random k-SAT knowledge-compilation laboratory"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master RNG seed");
  app.add_option("--node-cap", g.node_cap, "node budget per compilation");
  app.add_option("--time-cap", g.time_cap,
                 "per-instance compile budget in milliseconds (0 = none)");
  app.add_option("--jobs", g.jobs, "worker threads for sweeps");
  app.add_option("--out", g.out, "output file (default stdout)");

  // gen
  auto* gen = app.add_subcommand("gen", "emit a random instance as DIMACS");
  gen->fallthrough();
  SourceOpts gen_src;
  add_source_flags(gen, gen_src);
  gen->callback([&] {
    if (!gen_src.in_path.empty())
      throw std::invalid_argument("gen draws instances; --in is not accepted");
    const kcl::CnfFormula f = load_formula(gen_src, g.seed);
    write_output(g.out, kcl::emit_dimacs(f));
  });

  // compile
  auto* compile = app.add_subcommand(
      "compile", "compile one instance and report size and model count");
  compile->fallthrough();
  SourceOpts compile_src;
  add_source_flags(compile, compile_src);
  std::string compile_lang = "obdd";
  compile->add_option("--lang", compile_lang, "obdd | dfa | dnnf")
      ->required();
  compile->callback([&] {
    const kcl::CnfFormula f = load_formula(compile_src, g.seed);
    write_output(g.out,
                 compile_report(f, kcl::language_from_string(compile_lang), g));
  });

  // count
  auto* count = app.add_subcommand(
      "count", "brute-force model count (enumeration oracle)");
  count->fallthrough();
  SourceOpts count_src;
  add_source_flags(count, count_src);
  int count_cap = kcl::kDefaultOracleCap;
  count->add_option("--cap", count_cap, "largest n the oracle accepts");
  count->callback([&] {
    const kcl::CnfFormula f = load_formula(count_src, g.seed);
    std::ostringstream line;
    line << "models=" << kcl::brute_force_count(f, count_cap) << '\n';
    write_output(g.out, line.str());
  });

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "size sweep over an r-grid, emitted as CSV");
  sweep->fallthrough();
  kcl::SweepConfig sweep_cfg;
  std::vector<std::string> sweep_langs;
  sweep_cfg.ns = {20};
  sweep->add_option("--k", sweep_cfg.k, "clause length");
  sweep->add_option("--n", sweep_cfg.ns, "variable counts (repeatable)");
  sweep->add_option("--r-start", sweep_cfg.grid.start, "grid start");
  sweep->add_option("--r-stop", sweep_cfg.grid.stop, "grid stop");
  sweep->add_option("--r-step", sweep_cfg.grid.step, "grid step");
  sweep->add_option("--instances", sweep_cfg.instances_per_point,
                    "instances per grid point");
  sweep->add_option("--lang", sweep_langs,
                    "languages to compile (default: all three)");
  sweep->callback([&] {
    sweep_cfg.seed = g.seed;
    sweep_cfg.node_cap = g.node_cap;
    sweep_cfg.time_cap_ms = g.time_cap;
    sweep_cfg.jobs = g.jobs;
    if (!sweep_langs.empty()) {
      sweep_cfg.languages.clear();
      for (const std::string& name : sweep_langs)
        sweep_cfg.languages.push_back(kcl::language_from_string(name));
    }
    const std::vector<kcl::SweepRow> rows = kcl::run_sweep(sweep_cfg);
    std::ostringstream csv;
    kcl::emit_sweep_csv(rows, csv);
    write_output(g.out, csv.str());
  });

  // paths
  auto* paths = app.add_subcommand(
      "paths", "multi-interchangeable-path phase experiment, emitted as CSV");
  paths->fallthrough();
  kcl::PhaseExperimentConfig phase_cfg;
  paths->add_option("--k", phase_cfg.k, "clause length");
  paths->add_option("--n", phase_cfg.n, "variable count");
  paths->add_option("--r-start", phase_cfg.r_start, "grid start");
  paths->add_option("--r-stop", phase_cfg.r_stop, "grid stop");
  paths->add_option("--r-step", phase_cfg.r_step, "grid step");
  paths->add_option("--instances", phase_cfg.instances_per_r,
                    "instances per grid point");
  paths->add_option("--probes", phase_cfg.probe_clauses,
                    "probe clauses per instance");
  paths->add_option("--threshold", phase_cfg.threshold,
                    "probe hits needed for the EasyHard label");
  paths->callback([&] {
    phase_cfg.seed = g.seed;
    phase_cfg.node_cap = g.node_cap;
    phase_cfg.jobs = g.jobs;
    const std::vector<kcl::PhaseRow> rows = kcl::phase_experiment(phase_cfg);
    std::ostringstream csv;
    kcl::emit_phase_csv(rows, csv);
    write_output(g.out, csv.str());
  });

  // fit
  auto* fit = app.add_subcommand(
      "fit", "growth fits per (k, language, r) series of a sweep CSV");
  fit->fallthrough();
  std::string fit_csv;
  fit->add_option("--csv", fit_csv, "sweep CSV to fit")->required();
  fit->callback([&] {
    std::ifstream in(fit_csv);
    if (!in) throw std::runtime_error("cannot open input file: " + fit_csv);
    const std::vector<kcl::SweepRow> rows = kcl::parse_sweep_csv(in);
    std::map<std::tuple<int, int, double>, std::vector<std::pair<int, double>>>
        series;
    for (const kcl::SweepRow& row : rows)
      series[{row.k, static_cast<int>(row.language), row.r}].push_back(
          {row.n, row.mean_nodes});
    std::ostringstream out;
    int fitted = 0;
    for (const auto& [key, points] : series) {
      if (points.size() < 4) continue;
      const kcl::GrowthFit fit_result = kcl::fit_growth(points);
      out << "k=" << std::get<0>(key) << " language="
          << kcl::to_string(static_cast<kcl::Language>(std::get<1>(key)))
          << " r=" << std::get<2>(key)
          << " semilog_slope=" << fit_result.semilog_slope
          << " semilog_r2=" << fit_result.semilog_r2
          << " loglog_slope=" << fit_result.loglog_slope
          << " loglog_r2=" << fit_result.loglog_r2 << '\n';
      ++fitted;
    }
    if (fitted == 0)
      throw std::runtime_error(
          "no (k, language, r) series with at least 4 n values");
    write_output(g.out, out.str());
  });

  // plot
  auto* plot = app.add_subcommand(
      "plot", "emit a python3/matplotlib script rendering a CSV");
  plot->fallthrough();
  std::string plot_kind_name, plot_csv;
  plot->add_option("--kind", plot_kind_name,
                   "size-vs-r | log-size-vs-n | loglog-size-vs-n | "
                   "phase-fraction-vs-r")
      ->required();
  plot->add_option("--csv", plot_csv, "CSV the script will read")->required();
  plot->callback([&] {
    const kcl::PlotKind kind = kcl::plot_kind_from_string(plot_kind_name);
    std::ifstream in(plot_csv);
    if (!in) throw std::runtime_error("cannot open input file: " + plot_csv);
    std::string script;
    if (kind == kcl::PlotKind::PhaseFractionVsR)
      script = kcl::emit_plot_script(kind, kcl::parse_phase_csv(in), plot_csv);
    else
      script = kcl::emit_plot_script(kind, kcl::parse_sweep_csv(in), plot_csv);
    write_output(g.out, script);
  });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
