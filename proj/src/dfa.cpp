#include "kcl/dfa.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <utility>

namespace kcl {

namespace {

LevelDfa empty_dfa(int n, VarOrder order) {
  return LevelDfa{n, std::move(order), {}};
}

// Required bit per level for paths compatible with the clause's nogood;
// -1 at unconstrained levels.
std::vector<int> nogood_bits_by_level(const LevelDfa& dfa,
                                      const Clause& clause) {
  std::vector<int> req(dfa.n, -1);
  const PartialAssignment nogood = adjoint_nogood(clause);
  for (const auto& [var, value] : nogood.pairs()) {
    if (var < 1 || var > dfa.n)
      throw std::invalid_argument("clause variable out of range");
    req[dfa.order.level_of(var)] = value ? 1 : 0;
  }
  return req;
}

}  // namespace

LevelDfa full_dfa(VarOrder order) {
  const int n = order.num_vars();
  LevelDfa dfa{n, std::move(order), {}};
  dfa.levels.assign(n + 1, {DfaState{}});
  for (int i = 0; i < n; ++i) dfa.levels[i][0] = DfaState{{0, 0}};
  return dfa;
}

LevelDfa full_dfa(int n) {
  if (n < 1) throw std::invalid_argument("full_dfa requires n >= 1");
  return full_dfa(VarOrder(n));
}

LevelDfa dfa_from_obdd(const ObddManager& mgr, ObddManager::Ref f,
                       std::uint64_t state_cap) {
  const int n = mgr.num_vars();
  if (f == ObddManager::kFalse) return empty_dfa(n, mgr.order());

  LevelDfa dfa{n, mgr.order(), {}};
  dfa.levels.assign(n + 1, {});

  // One state per (level, cofactor) pair; refs index the manager's arena.
  // States are numbered in scan order (bit 0 first), which is the canonical
  // numbering minimize() produces.
  std::vector<std::unordered_map<ObddManager::Ref, std::int32_t>> index(n + 1);
  std::vector<std::vector<ObddManager::Ref>> refs(n + 1);
  std::uint64_t total_states = 0;

  auto intern = [&](int level, ObddManager::Ref r) {
    auto [it, inserted] = index[level].emplace(
        r, static_cast<std::int32_t>(refs[level].size()));
    if (inserted) {
      if (++total_states > state_cap)
        throw resource_limit_error(resource_limit_error::Kind::node_cap,
                                   "DFA state cap exceeded");
      refs[level].push_back(r);
      dfa.levels[level].push_back(DfaState{});
    }
    return it->second;
  };

  intern(0, f);
  for (int level = 0; level < n; ++level) {
    for (std::size_t s = 0; s < refs[level].size(); ++s) {
      const ObddManager::Ref r = refs[level][s];
      const bool tested_here = !mgr.is_terminal(r) && mgr.level_of(r) == level;
      for (int b = 0; b < 2; ++b) {
        const ObddManager::Ref child =
            tested_here ? (b ? mgr.hi(r) : mgr.lo(r)) : r;
        if (child == ObddManager::kFalse) continue;
        dfa.levels[level][s].next[b] = intern(level + 1, child);
      }
    }
  }
  return dfa;
}

LevelDfa compile_cnf_to_dfa(const CnfFormula& f, const VarOrder& order,
                            const ObddLimits& limits) {
  if (order.num_vars() != f.num_vars)
    throw std::invalid_argument("order size must match the formula");
  ObddManager mgr(order, limits);
  const ObddManager::Ref root = mgr.compile_cnf(f);
  return dfa_from_obdd(mgr, root, limits.node_cap);
}

LevelDfa compile_cnf_to_dfa(const CnfFormula& f, const ObddLimits& limits) {
  return compile_cnf_to_dfa(f, VarOrder(f.num_vars), limits);
}

LevelDfa compile_cnf_to_dfa_incremental(const CnfFormula& f,
                                        const VarOrder& order) {
  if (order.num_vars() != f.num_vars)
    throw std::invalid_argument("order size must match the formula");
  LevelDfa acc = full_dfa(order);
  for (const Clause& c : f.clauses) {
    acc = conjoin_clause(acc, c);
    if (acc.empty_language()) break;
  }
  return acc;
}

LevelDfa conjoin_clause(const LevelDfa& dfa, const Clause& clause) {
  if (dfa.empty_language()) return empty_dfa(dfa.n, dfa.order);
  const std::vector<int> req = nogood_bits_by_level(dfa, clause);
  const int n = dfa.n;

  // Product with the clause acceptor: flag 1 once the path deviates from
  // the nogood. Only flagged level-n states accept.
  LevelDfa raw{n, dfa.order, {}};
  raw.levels.assign(n + 1, {});
  std::vector<std::map<std::pair<std::int32_t, int>, std::int32_t>> index(n +
                                                                          1);
  std::vector<std::vector<std::pair<std::int32_t, int>>> keys(n + 1);

  auto intern = [&](int level, std::int32_t s, int flag) {
    auto [it, inserted] =
        index[level].emplace(std::make_pair(s, flag),
                             static_cast<std::int32_t>(keys[level].size()));
    if (inserted) {
      keys[level].push_back({s, flag});
      raw.levels[level].push_back(DfaState{});
    }
    return it->second;
  };

  intern(0, 0, 0);
  for (int level = 0; level < n; ++level) {
    for (std::size_t p = 0; p < keys[level].size(); ++p) {
      const auto [s, flag] = keys[level][p];
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t < 0) continue;
        const int next_flag =
            flag || (req[level] != -1 && b != req[level]) ? 1 : 0;
        if (level + 1 == n && next_flag == 0) continue;  // would not accept
        raw.levels[level][p].next[b] = intern(level + 1, t, next_flag);
      }
    }
  }
  return minimize(raw);
}

LevelDfa minimize(const LevelDfa& dfa) {
  if (dfa.empty_language()) return empty_dfa(dfa.n, dfa.order);
  const int n = dfa.n;
  if (static_cast<int>(dfa.levels.size()) != n + 1)
    throw std::invalid_argument("level count must be n + 1");

  // Backward signature pass: class -1 marks states with no path to accept.
  std::vector<std::vector<std::int32_t>> cls(n + 1);
  std::vector<int> class_count(n + 1, 0);
  cls[n].assign(dfa.levels[n].size(), 0);
  class_count[n] = dfa.levels[n].empty() ? 0 : 1;
  for (int level = n - 1; level >= 0; --level) {
    const auto& states = dfa.levels[level];
    cls[level].assign(states.size(), -1);
    std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> sig_ids;
    for (std::size_t s = 0; s < states.size(); ++s) {
      std::int32_t c0 = -1, c1 = -1;
      if (states[s].next[0] >= 0) c0 = cls[level + 1][states[s].next[0]];
      if (states[s].next[1] >= 0) c1 = cls[level + 1][states[s].next[1]];
      if (c0 == -1 && c1 == -1) continue;  // dead
      auto [it, inserted] = sig_ids.emplace(
          std::make_pair(c0, c1), static_cast<std::int32_t>(sig_ids.size()));
      cls[level][s] = it->second;
    }
    class_count[level] = static_cast<int>(sig_ids.size());
  }
  if (dfa.levels[0].empty() || cls[0][0] == -1)
    return empty_dfa(n, dfa.order);

  // Class transitions, from any representative (all members agree).
  std::vector<std::vector<DfaState>> merged(n + 1);
  for (int level = 0; level <= n; ++level) {
    merged[level].assign(class_count[level], DfaState{});
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      const std::int32_t c = cls[level][s];
      if (c == -1) continue;
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t < 0 || cls[level + 1][t] == -1) continue;
        merged[level][c].next[b] = cls[level + 1][t];
      }
    }
  }

  // Canonical renumbering: scan levels top-down in new-id order, bit 0
  // first; drops classes not reachable from the initial class.
  LevelDfa out{n, dfa.order, {}};
  out.levels.assign(n + 1, {});
  std::vector<std::vector<std::int32_t>> new_id(n + 1);
  std::vector<std::vector<std::int32_t>> order_of(n + 1);
  for (int level = 0; level <= n; ++level)
    new_id[level].assign(class_count[level], -1);
  new_id[0][cls[0][0]] = 0;
  order_of[0].push_back(cls[0][0]);
  out.levels[0].push_back(DfaState{});
  for (int level = 0; level < n; ++level) {
    for (std::size_t p = 0; p < order_of[level].size(); ++p) {
      const std::int32_t c = order_of[level][p];
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = merged[level][c].next[b];
        if (t < 0) continue;
        if (new_id[level + 1][t] == -1) {
          new_id[level + 1][t] =
              static_cast<std::int32_t>(order_of[level + 1].size());
          order_of[level + 1].push_back(t);
          out.levels[level + 1].push_back(DfaState{});
        }
        out.levels[level][p].next[b] = new_id[level + 1][t];
      }
    }
  }
  return out;
}

std::uint64_t accepting_path_count(const LevelDfa& dfa) {
  if (dfa.empty_language()) return 0;
  if (dfa.n > 62)
    throw std::invalid_argument("path count supports n <= 62");
  std::vector<std::uint64_t> counts(dfa.levels[0].size(), 0);
  counts[0] = 1;
  for (int level = 0; level < dfa.n; ++level) {
    std::vector<std::uint64_t> next_counts(dfa.levels[level + 1].size(), 0);
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t >= 0) next_counts[t] += counts[s];
      }
    }
    counts = std::move(next_counts);
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  return total;
}

std::uint64_t dfa_state_count(const LevelDfa& dfa) {
  std::uint64_t total = 0;
  for (const auto& level : dfa.levels) total += level.size();
  return total;
}

bool accepts(const LevelDfa& dfa, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != dfa.n)
    throw std::invalid_argument("bit string length must equal n");
  if (dfa.empty_language()) return false;
  std::int32_t s = 0;
  for (int level = 0; level < dfa.n; ++level) {
    s = dfa.levels[level][s].next[bits[level] ? 1 : 0];
    if (s < 0) return false;
  }
  return true;
}

bool well_formed(const LevelDfa& dfa) {
  if (dfa.order.num_vars() != dfa.n) return false;
  if (dfa.levels.empty()) return true;  // canonical empty language
  if (static_cast<int>(dfa.levels.size()) != dfa.n + 1) return false;
  if (dfa.levels[0].size() != 1 || dfa.levels[dfa.n].size() != 1) return false;
  if (dfa.levels[dfa.n][0] != DfaState{}) return false;

  // Targets in range; co-reachability back-to-front; reachability
  // front-to-back.
  std::vector<std::vector<bool>> coreach(dfa.n + 1);
  coreach[dfa.n].assign(1, true);
  for (int level = dfa.n - 1; level >= 0; --level) {
    coreach[level].assign(dfa.levels[level].size(), false);
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t < 0) continue;
        if (t >= static_cast<std::int32_t>(dfa.levels[level + 1].size()))
          return false;
        if (coreach[level + 1][t]) coreach[level][s] = true;
      }
    }
  }
  for (const auto& level : coreach)
    for (bool c : level)
      if (!c) return false;

  std::vector<bool> reach(dfa.levels[0].size(), false);
  reach[0] = true;
  for (int level = 0; level < dfa.n; ++level) {
    std::vector<bool> next_reach(dfa.levels[level + 1].size(), false);
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      if (!reach[s]) return false;
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t >= 0) next_reach[t] = true;
      }
    }
    reach = std::move(next_reach);
  }
  for (bool rb : reach)
    if (!rb) return false;
  return true;
}

void dump_transitions(const LevelDfa& dfa, std::ostream& out) {
  for (int level = 0; level < dfa.n && !dfa.levels.empty(); ++level) {
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t >= 0)
          out << level << ' ' << s << ' ' << b << ' ' << t << '\n';
      }
    }
  }
}

void to_dot(const LevelDfa& dfa, std::ostream& out) {
  out << "digraph dfa {\n  rankdir=TB;\n";
  for (std::size_t level = 0; level < dfa.levels.size(); ++level) {
    out << "  { rank=same;";
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s)
      out << " L" << level << "_" << s << ";";
    out << " }\n";
  }
  for (int level = 0; level + 1 < static_cast<int>(dfa.levels.size());
       ++level) {
    for (std::size_t s = 0; s < dfa.levels[level].size(); ++s) {
      for (int b = 0; b < 2; ++b) {
        const std::int32_t t = dfa.levels[level][s].next[b];
        if (t >= 0)
          out << "  L" << level << "_" << s << " -> L" << level + 1 << "_" << t
              << " [label=\"" << b << "\"" << (b ? "" : ",style=dashed")
              << "];\n";
      }
    }
  }
  out << "}\n";
}

}  // namespace kcl
