#include "kcl/sweep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "kcl/dfa.hpp"
#include "kcl/dnnf.hpp"
#include "kcl/obdd.hpp"
#include "kcl/parallel.hpp"
#include "kcl/rng.hpp"

namespace kcl {

namespace {

constexpr const char* kSweepSchemaTag = "# sweep-csv-v1";
constexpr const char* kSweepHeader =
    "k,n,r,m,language,instances_completed,blowups,unsat_count,mean_nodes,"
    "median_nodes,stddev_nodes,mean_edges,mean_compile_ms";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string to_string(Language language) {
  switch (language) {
    case Language::Obdd:
      return "OBDD";
    case Language::Dfa:
      return "DFA";
    case Language::Dnnf:
      return "DNNF";
  }
  throw std::invalid_argument("unknown language");
}

Language language_from_string(const std::string& name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper == "OBDD") return Language::Obdd;
  if (upper == "DFA") return Language::Dfa;
  if (upper == "DNNF") return Language::Dnnf;
  throw std::invalid_argument("unknown language: " + name);
}

int RGrid::points() const {
  if (step <= 0) throw std::invalid_argument("grid step must be positive");
  if (stop < start) throw std::invalid_argument("grid stop before start");
  return static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
}

ThresholdTable::ThresholdTable()
    : r_p_by_k_{{2, 1.0}, {3, 4.3}, {4, 9.93}, {5, 21.12}, {6, 43.37}} {}

double ThresholdTable::r_p(int k) const {
  auto it = r_p_by_k_.find(k);
  if (it == r_p_by_k_.end())
    throw std::invalid_argument("no threshold ratio recorded for k=" +
                                std::to_string(k));
  return it->second;
}

namespace {

struct InstanceOutcome {
  bool completed = false;
  bool unsat = false;
  std::uint64_t nodes = 0;
  std::uint64_t edges = 0;
  double ms = 0;
};

std::uint64_t dfa_edge_total(const LevelDfa& dfa) {
  std::uint64_t edges = 0;
  for (const auto& level : dfa.levels)
    for (const DfaState& s : level)
      edges += (s.next[0] >= 0 ? 1 : 0) + (s.next[1] >= 0 ? 1 : 0);
  return edges;
}

InstanceOutcome compile_one(const CnfFormula& f, Language language,
                            std::uint64_t node_cap, std::uint64_t time_cap) {
  InstanceOutcome outcome;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (language) {
      case Language::Obdd: {
        ObddManager mgr(VarOrder(f.num_vars), ObddLimits{node_cap, static_cast<double>(time_cap)});
        const ObddManager::Ref root = mgr.compile_cnf(f);
        const SizeReport report = mgr.node_count(root);
        outcome.nodes = report.nodes;
        outcome.edges = report.edges;
        outcome.unsat = root == ObddManager::kFalse;
        break;
      }
      case Language::Dfa: {
        const LevelDfa dfa =
            compile_cnf_to_dfa(f, ObddLimits{node_cap, static_cast<double>(time_cap)});
        outcome.nodes = dfa_state_count(dfa);
        outcome.edges = dfa_edge_total(dfa);
        outcome.unsat = dfa.empty_language();
        break;
      }
      case Language::Dnnf: {
        DnnfDag dag;
        DnnfCompileOptions opts;
        opts.node_cap = node_cap;
        opts.time_cap_ms = time_cap;
        const DnnfDag::Ref root = compile_cnf_to_dnnf(f, dag, opts);
        const SizeReport report = dnnf_node_count(dag, root);
        outcome.nodes = report.nodes;
        outcome.edges = report.edges;
        outcome.unsat = root == DnnfDag::kFalse;
        break;
      }
    }
    outcome.completed = true;
  } catch (const resource_limit_error&) {
    outcome.completed = false;
  }
  outcome.ms = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return outcome;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  if (config.k < 1) throw std::invalid_argument("k must be positive");
  if (config.ns.empty()) throw std::invalid_argument("no n values given");
  for (int n : config.ns)
    if (n < config.k)
      throw std::invalid_argument("every n must be at least k");
  if (config.instances_per_point < 1)
    throw std::invalid_argument("instances_per_point must be positive");
  if (config.languages.empty())
    throw std::invalid_argument("no languages given");
  const int points = config.grid.points();

  std::vector<Language> languages = config.languages;
  std::sort(languages.begin(), languages.end());
  languages.erase(std::unique(languages.begin(), languages.end()),
                  languages.end());

  std::vector<SweepRow> rows;
  for (int n : config.ns) {
    for (int p = 0; p < points; ++p) {
      const double r = config.grid.at(p);
      const long m = std::lround(r * n);
      std::vector<std::array<InstanceOutcome, 3>> outcomes(
          config.instances_per_point);
      parallel_for(
          config.instances_per_point, config.jobs, [&](std::uint64_t j) {
            const std::uint64_t instance_seed = derive_seed(
                config.seed, {static_cast<std::uint64_t>(config.k),
                              static_cast<std::uint64_t>(n),
                              static_cast<std::uint64_t>(m), j});
            const CnfFormula f =
                generate_instance(GenParams{config.k, n, m, instance_seed});
            for (Language language : languages)
              outcomes[j][static_cast<int>(language)] = compile_one(
                  f, language, config.node_cap, config.time_cap_ms);
          });

      for (Language language : languages) {
        SweepRow row;
        row.k = config.k;
        row.n = n;
        row.r = r;
        row.m = m;
        row.language = language;
        std::vector<std::uint64_t> sizes;
        sizes.reserve(config.instances_per_point);
        double node_sum = 0, edge_sum = 0, ms_sum = 0;
        for (const auto& per_language : outcomes) {
          const InstanceOutcome& oc =
              per_language[static_cast<int>(language)];
          if (!oc.completed) {
            ++row.blowups;
            continue;
          }
          ++row.instances_completed;
          if (oc.unsat) ++row.unsat_count;
          sizes.push_back(oc.nodes);
          node_sum += static_cast<double>(oc.nodes);
          edge_sum += static_cast<double>(oc.edges);
          ms_sum += oc.ms;
        }
        if (row.instances_completed > 0) {
          const double count = row.instances_completed;
          row.mean_nodes = node_sum / count;
          row.mean_edges = edge_sum / count;
          row.mean_compile_ms = ms_sum / count;
          std::sort(sizes.begin(), sizes.end());
          const std::size_t mid = sizes.size() / 2;
          row.median_nodes =
              sizes.size() % 2 == 1
                  ? static_cast<double>(sizes[mid])
                  : (static_cast<double>(sizes[mid - 1]) +
                     static_cast<double>(sizes[mid])) /
                        2.0;
          double ss = 0;
          for (std::uint64_t s : sizes) {
            const double d = static_cast<double>(s) - row.mean_nodes;
            ss += d * d;
          }
          row.stddev_nodes = std::sqrt(ss / count);
        }
        rows.push_back(row);
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::make_tuple(a.k, a.n, a.r, static_cast<int>(a.language)) <
           std::make_tuple(b.k, b.n, b.r, static_cast<int>(b.language));
  });
  return rows;
}

void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepSchemaTag << '\n' << kSweepHeader << '\n';
  for (const SweepRow& row : rows) {
    out << row.k << ',' << row.n << ',' << fmt(row.r) << ',' << row.m << ','
        << to_string(row.language) << ',' << row.instances_completed << ','
        << row.blowups << ',' << row.unsat_count << ',' << fmt(row.mean_nodes)
        << ',' << fmt(row.median_nodes) << ',' << fmt(row.stddev_nodes) << ','
        << fmt(row.mean_edges) << ',' << fmt(row.mean_compile_ms) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t begin = 0;
  for (;;) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(begin));
      return fields;
    }
    fields.push_back(line.substr(begin, comma - begin));
    begin = comma + 1;
  }
}

}  // namespace

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSweepHeader)
        throw parse_error(line_no, "unexpected sweep CSV header");
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 13)
      throw parse_error(line_no, "expected 13 fields");
    try {
      SweepRow row;
      row.k = std::stoi(fields[0]);
      row.n = std::stoi(fields[1]);
      row.r = std::stod(fields[2]);
      row.m = std::stol(fields[3]);
      row.language = language_from_string(fields[4]);
      row.instances_completed = std::stoi(fields[5]);
      row.blowups = std::stoi(fields[6]);
      row.unsat_count = std::stoi(fields[7]);
      row.mean_nodes = std::stod(fields[8]);
      row.median_nodes = std::stod(fields[9]);
      row.stddev_nodes = std::stod(fields[10]);
      row.mean_edges = std::stod(fields[11]);
      row.mean_compile_ms = std::stod(fields[12]);
      rows.push_back(row);
    } catch (const std::exception& e) {
      throw parse_error(line_no, e.what());
    }
  }
  if (!header_seen) throw parse_error(line_no, "missing sweep CSV header");
  return rows;
}

PeakResult detect_peak(const std::vector<SweepRow>& rows) {
  if (rows.size() < 5)
    throw std::invalid_argument("peak detection needs at least 5 grid points");
  for (const SweepRow& row : rows)
    if (row.k != rows[0].k || row.n != rows[0].n ||
        row.language != rows[0].language)
      throw std::invalid_argument("rows must share k, n, and language");
  std::vector<SweepRow> sorted = rows;
  std::sort(sorted.begin(), sorted.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.r < b.r; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].r == sorted[i - 1].r)
      throw std::invalid_argument("duplicate grid point");

  const std::size_t count = sorted.size();
  std::vector<double> raw(count), smoothed(count);
  for (std::size_t i = 0; i < count; ++i) raw[i] = sorted[i].mean_nodes;
  for (std::size_t i = 0; i < count; ++i) {
    if (i == 0)
      smoothed[i] = (raw[0] + raw[1]) / 2.0;
    else if (i + 1 == count)
      smoothed[i] = (raw[count - 2] + raw[count - 1]) / 2.0;
    else
      smoothed[i] = (raw[i - 1] + raw[i] + raw[i + 1]) / 3.0;
  }
  const auto argmax = [](const std::vector<double>& ys) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ys.size(); ++i)
      if (ys[i] > ys[best]) best = i;
    return best;
  };
  const std::size_t raw_at = argmax(raw);
  const std::size_t smoothed_at = argmax(smoothed);
  PeakResult result;
  result.found = smoothed_at != 0 && smoothed_at + 1 != count;
  result.r_raw = sorted[raw_at].r;
  result.r_smoothed = sorted[smoothed_at].r;
  return result;
}

namespace {

// Ordinary least squares of y on x; r2 of a constant series is 1 when the
// fit is exact.
void least_squares(const std::vector<double>& xs, const std::vector<double>& ys,
                   double& slope, double& r2) {
  const double count = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("degenerate x values in fit");
  slope = sxy / sxx;
  const double ss_res = syy - slope * sxy;
  r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
}

}  // namespace

GrowthFit fit_growth(const std::vector<std::pair<int, double>>& points) {
  std::vector<std::pair<int, double>> usable;
  for (const auto& [n, nodes] : points) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (nodes > 0) usable.push_back({n, nodes});
  }
  std::sort(usable.begin(), usable.end());
  for (std::size_t i = 1; i < usable.size(); ++i)
    if (usable[i].first == usable[i - 1].first)
      throw std::invalid_argument("duplicate n in growth fit");
  if (usable.size() < 4)
    throw std::invalid_argument("growth fit needs at least 4 points");

  std::vector<double> ns, log_ns, log_nodes;
  for (const auto& [n, nodes] : usable) {
    ns.push_back(static_cast<double>(n));
    log_ns.push_back(std::log(static_cast<double>(n)));
    log_nodes.push_back(std::log(nodes));
  }
  GrowthFit fit;
  least_squares(ns, log_nodes, fit.semilog_slope, fit.semilog_r2);
  least_squares(log_ns, log_nodes, fit.loglog_slope, fit.loglog_r2);
  return fit;
}

}  // namespace kcl
