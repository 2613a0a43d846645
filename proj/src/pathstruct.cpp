#include "kcl/pathstruct.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kcl/obdd.hpp"
#include "kcl/parallel.hpp"
#include "kcl/rng.hpp"

namespace kcl {

namespace {

// Forced bit per level under the clause's nogood; -1 where unconstrained.
std::vector<int> nogood_bits(const LevelDfa& dfa, const Clause& clause) {
  std::vector<int> req(dfa.n, -1);
  const PartialAssignment nogood = adjoint_nogood(clause);
  for (const auto& [var, value] : nogood.pairs()) {
    if (var < 1 || var > dfa.n)
      throw std::invalid_argument("clause variable out of range");
    req[dfa.order.level_of(var)] = value ? 1 : 0;
  }
  return req;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::vector<DfaEdge> adjoint_edges(const LevelDfa& dfa,
                                   const std::vector<std::uint8_t>& path) {
  if (static_cast<int>(path.size()) != dfa.n)
    throw std::invalid_argument("path length must equal n");
  if (dfa.empty_language())
    throw std::invalid_argument("path is not an accepting path");
  std::vector<DfaEdge> edges;
  std::int32_t s = 0;
  for (int level = 0; level < dfa.n; ++level) {
    const int b = path[level] ? 1 : 0;
    const std::int32_t t = dfa.levels[level][s].next[b];
    if (t < 0) throw std::invalid_argument("path is not an accepting path");
    if (dfa.levels[level][s].next[1 - b] == t)
      edges.push_back(DfaEdge{level, s, 1 - b, t});
    s = t;
  }
  return edges;
}

PathClassification classify_path(const LevelDfa& dfa,
                                 const std::vector<std::uint8_t>& path,
                                 const Clause& clause) {
  if (static_cast<int>(path.size()) != dfa.n)
    throw std::invalid_argument("path length must equal n");
  const std::vector<int> req = nogood_bits(dfa, clause);
  for (int level = 0; level < dfa.n; ++level)
    if (req[level] != -1 && (path[level] ? 1 : 0) != req[level])
      throw std::invalid_argument("path is incompatible with the nogood");
  PathClassification result;
  for (const DfaEdge& e : adjoint_edges(dfa, path))
    if (req[e.level] != -1) ++result.i;
  return result;
}

bool has_multi_interchangeable_path(const LevelDfa& dfa,
                                    const Clause& clause) {
  if (dfa.empty_language()) return false;
  const std::vector<int> req = nogood_bits(dfa, clause);

  // best[s] = max adjoint edges collectable on a compatible prefix into s,
  // saturated at 2; -1 marks unreachable states.
  std::vector<int> best(dfa.levels[0].size(), -1);
  best[0] = 0;
  for (int level = 0; level < dfa.n; ++level) {
    std::vector<int> next_best(dfa.levels[level + 1].size(), -1);
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      if (best[s] < 0) continue;
      const DfaState& state = dfa.levels[level][s];
      if (req[level] != -1) {
        const std::int32_t t = state.next[req[level]];
        if (t < 0) continue;
        const int gain = state.next[1 - req[level]] == t ? 1 : 0;
        next_best[t] = std::max(next_best[t],
                                std::min(2, best[static_cast<int>(s)] + gain));
      } else {
        for (int b = 0; b < 2; ++b) {
          const std::int32_t t = state.next[b];
          if (t >= 0) next_best[t] = std::max(next_best[t], best[s]);
        }
      }
    }
    best = std::move(next_best);
  }
  for (int v : best)
    if (v >= 2) return true;
  return false;
}

bool fully_multi_interchangeable(const CnfFormula& f, int cap) {
  const std::vector<bool> member = model_bitset(f, cap);
  const std::uint64_t domain = std::uint64_t{1} << f.num_vars;
  int interchangeable = 0;
  for (int var = 1; var <= f.num_vars; ++var) {
    const std::uint64_t bit = std::uint64_t{1} << (var - 1);
    bool ok = true;
    for (std::uint64_t a = 0; a < domain && ok; ++a)
      if ((a & bit) == 0 && member[a] != member[a | bit]) ok = false;
    if (ok && ++interchangeable >= 2) return true;
  }
  return false;
}

bool weak_multi_interchangeable(const CnfFormula& f,
                                const PartialAssignment& partial, int cap) {
  const int n = f.num_vars;
  std::uint64_t pmask = 0, pval = 0;
  for (const auto& [var, value] : partial.pairs()) {
    if (var < 1 || var > n)
      throw std::invalid_argument("assigned variable out of range");
    pmask |= std::uint64_t{1} << (var - 1);
    if (value) pval |= std::uint64_t{1} << (var - 1);
  }
  if (static_cast<int>(partial.size()) > n - 2) return false;
  const std::vector<bool> member = model_bitset(f, cap);
  const std::uint64_t domain = std::uint64_t{1} << n;
  for (std::uint64_t a = 0; a < domain; ++a)
    if ((a & pmask) == pval && !member[a]) return false;
  return true;
}

std::vector<PhaseRow> phase_experiment(const PhaseExperimentConfig& config) {
  if (config.k < 1 || config.k > config.n)
    throw std::invalid_argument("phase experiment requires 1 <= k <= n");
  if (config.threshold <= 0 || config.threshold >= config.probe_clauses)
    throw std::invalid_argument("require 0 < threshold < probe_clauses");
  if (config.instances_per_r < 1)
    throw std::invalid_argument("instances_per_r must be positive");
  if (config.r_step <= 0 || config.r_stop < config.r_start)
    throw std::invalid_argument("bad r grid");

  struct Outcome {
    bool completed = false;
    PhaseLabel label = PhaseLabel::HardEasy;
    std::uint64_t states = 0;
  };

  const int points = static_cast<int>(std::floor(
                         (config.r_stop - config.r_start) / config.r_step +
                         1e-9)) +
                     1;
  std::vector<PhaseRow> rows;
  rows.reserve(points);
  for (int p = 0; p < points; ++p) {
    const double r = config.r_start + p * config.r_step;
    const long m = std::lround(r * config.n);
    std::vector<Outcome> outcomes(config.instances_per_r);
    parallel_for(config.instances_per_r, config.jobs, [&](std::uint64_t j) {
      const std::uint64_t instance_seed = derive_seed(
          config.seed, {static_cast<std::uint64_t>(config.k),
                        static_cast<std::uint64_t>(config.n),
                        static_cast<std::uint64_t>(m), j});
      const CnfFormula f = generate_instance(
          GenParams{config.k, config.n, m, instance_seed});
      try {
        const LevelDfa dfa =
            compile_cnf_to_dfa(f, ObddLimits{config.node_cap, 0.0});
        Outcome outcome;
        outcome.completed = true;
        if (dfa.empty_language()) {
          outcomes[j] = outcome;  // HardEasy: no paths, zero probe hits
          return;
        }
        outcome.states = dfa_state_count(dfa);
        Rng probe_rng(derive_seed(
            config.seed, {static_cast<std::uint64_t>(config.k),
                          static_cast<std::uint64_t>(config.n),
                          static_cast<std::uint64_t>(m), j, 1}));
        int hits = 0;
        for (int q = 0; q < config.probe_clauses; ++q) {
          const Clause probe = random_clause(config.k, config.n, probe_rng);
          if (has_multi_interchangeable_path(dfa, probe)) ++hits;
        }
        outcome.label = hits > config.threshold ? PhaseLabel::EasyHard
                                                : PhaseLabel::HardEasy;
        outcomes[j] = outcome;
      } catch (const resource_limit_error&) {
        outcomes[j] = Outcome{};  // skipped, recorded as a blowup
      }
    });

    PhaseRow row;
    row.r = r;
    std::uint64_t state_sum = 0;
    for (const Outcome& outcome : outcomes) {
      if (!outcome.completed) {
        ++row.blowups;
        continue;
      }
      ++row.instances;
      if (outcome.label == PhaseLabel::EasyHard) ++row.easy_hard_count;
      state_sum += outcome.states;
    }
    if (row.instances > 0) {
      row.fraction = static_cast<double>(row.easy_hard_count) / row.instances;
      row.mean_dfa_states =
          static_cast<double>(state_sum) / row.instances;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {
constexpr const char* kPhaseHeader =
    "r,instances,easy_hard_count,fraction,mean_dfa_states";
}

void emit_phase_csv(const std::vector<PhaseRow>& rows, std::ostream& out) {
  out << "# phase-csv-v1\n" << kPhaseHeader << '\n';
  for (const PhaseRow& row : rows)
    out << fmt(row.r) << ',' << row.instances << ',' << row.easy_hard_count
        << ',' << fmt(row.fraction) << ',' << fmt(row.mean_dfa_states)
        << '\n';
}

std::vector<PhaseRow> parse_phase_csv(std::istream& in) {
  std::vector<PhaseRow> rows;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kPhaseHeader)
        throw parse_error(line_no, "unexpected phase CSV header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t begin = 0;
    for (;;) {
      const std::size_t comma = line.find(',', begin);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(begin));
        break;
      }
      fields.push_back(line.substr(begin, comma - begin));
      begin = comma + 1;
    }
    if (fields.size() != 5) throw parse_error(line_no, "expected 5 fields");
    try {
      PhaseRow row;
      row.r = std::stod(fields[0]);
      row.instances = std::stoi(fields[1]);
      row.easy_hard_count = std::stoi(fields[2]);
      row.fraction = std::stod(fields[3]);
      row.mean_dfa_states = std::stod(fields[4]);
      rows.push_back(row);
    } catch (const std::exception& e) {
      throw parse_error(line_no, e.what());
    }
  }
  if (!header_seen) throw parse_error(line_no, "missing phase CSV header");
  return rows;
}

}  // namespace kcl
