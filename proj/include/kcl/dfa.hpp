#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kcl/cnf.hpp"
#include "kcl/obdd.hpp"

namespace kcl {

struct DfaState {
  // Successor index within the next level; -1 when the transition is absent.
  std::int32_t next[2] = {-1, -1};

  friend bool operator==(const DfaState&, const DfaState&) = default;
};

// Leveled DFA over {0,1}^n. levels[i] holds the states reached after reading
// i bits; the bit read at level i assigns the variable order.var_at(i).
// Accepting paths all have length n; the unique initial state is
// levels[0][0] and the unique accept state is levels[n][0]. The empty
// language is represented with every level empty (state count 0).
struct LevelDfa {
  int n = 0;
  VarOrder order;
  std::vector<std::vector<DfaState>> levels;

  bool empty_language() const { return levels.empty() || levels[0].empty(); }

  friend bool operator==(const LevelDfa&, const LevelDfa&) = default;
};

// Accepts all 2^n strings: one state per level, both bits advancing.
LevelDfa full_dfa(int n);
LevelDfa full_dfa(VarOrder order);

// Minimal leveled DFA with the same language as f; states at level i are the
// distinct non-false cofactors of f after i bits, so the result is already
// trimmed and minimal. Throws resource_limit_error past state_cap.
LevelDfa dfa_from_obdd(const ObddManager& mgr, ObddManager::Ref f,
                       std::uint64_t state_cap = 5'000'000);

// OBDD-route compilation: accepting paths, read under order, are exactly the
// models of f. Canonical per order.
LevelDfa compile_cnf_to_dfa(const CnfFormula& f, const VarOrder& order,
                            const ObddLimits& limits = {});
LevelDfa compile_cnf_to_dfa(const CnfFormula& f, const ObddLimits& limits = {});

// Independent route for cross-validation: fold conjoin_clause over the
// clauses starting from the full automaton.
LevelDfa compile_cnf_to_dfa_incremental(const CnfFormula& f,
                                        const VarOrder& order);

// Language of the result is L(dfa) intersected with the models of the
// clause; trimmed and minimized.
LevelDfa conjoin_clause(const LevelDfa& dfa, const Clause& clause);

// Level-wise Myhill-Nerode merge, backward from level n, plus trimming and
// canonical renumbering. Idempotent; canonical per (language, order).
LevelDfa minimize(const LevelDfa& dfa);

// Distinct initial-to-accept paths by level-wise DP. Requires n <= 62.
std::uint64_t accepting_path_count(const LevelDfa& dfa);

// States over all levels, initial and accept included; 0 for the empty
// language.
std::uint64_t dfa_state_count(const LevelDfa& dfa);

bool accepts(const LevelDfa& dfa, const std::vector<std::uint8_t>& bits);

// Representation invariants: transition targets in range, unique initial and
// accept states, every state reachable and co-reachable.
bool well_formed(const LevelDfa& dfa);

// One line per transition: "level src bit dst".
void dump_transitions(const LevelDfa& dfa, std::ostream& out);
void to_dot(const LevelDfa& dfa, std::ostream& out);

}  // namespace kcl
