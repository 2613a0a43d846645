#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "kcl/cnf.hpp"
#include "kcl/common.hpp"
#include "kcl/dfa.hpp"

namespace kcl {

// A single transition of a leveled DFA.
struct DfaEdge {
  int level = 0;
  std::int32_t src = 0;
  int bit = 0;
  std::int32_t dst = 0;

  friend bool operator==(const DfaEdge&, const DfaEdge&) = default;
};

// Edges not on the accepting path that share source and destination with a
// path edge.  Level by level that is exactly the opposite-bit edge when both
// bits of the path's state lead to the path's successor.
std::vector<DfaEdge> adjoint_edges(const LevelDfa& dfa,
                                   const std::vector<std::uint8_t>& path);

struct PathClassification {
  int i = 0;  // adjoint edges whose level variable lies in the nogood
};

// Classifies an accepting path against a clause.  The path must agree with
// the clause's nogood at every nogood level; i then counts the adjoint
// edges sitting at those levels.
PathClassification classify_path(const LevelDfa& dfa,
                                 const std::vector<std::uint8_t>& path,
                                 const Clause& clause);

// True iff some accepting path compatible with the clause's nogood carries
// two or more adjoint edges at nogood levels.  Dynamic program over the
// nogood-compatible sub-automaton; the per-state adjoint count saturates
// at 2.
bool has_multi_interchangeable_path(const LevelDfa& dfa, const Clause& clause);

// At least two variables whose two values are interchangeable in every
// solution (flipping the variable maps solutions to solutions).  Brute
// force over the truth table, hence the variable cap.
bool fully_multi_interchangeable(const CnfFormula& f,
                                 int cap = kDefaultOracleCap);

// The partial assignment leaves at least two variables unassigned and every
// total extension satisfies the formula.
bool weak_multi_interchangeable(const CnfFormula& f,
                                const PartialAssignment& partial,
                                int cap = kDefaultOracleCap);

enum class PhaseLabel { EasyHard, HardEasy };

// Probe protocol: per instance, compile the solution DFA, draw
// probe_clauses random clauses, and count how many have a
// multi-interchangeable path.  Strictly more than threshold hits labels
// the instance EasyHard; unsatisfiable instances have no paths at all and
// land on HardEasy.
struct PhaseExperimentConfig {
  int k = 3;
  int n = 18;
  double r_start = 0.2;
  double r_stop = 4.2;
  double r_step = 0.2;
  int instances_per_r = 100;
  int probe_clauses = 100;
  int threshold = 50;
  std::uint64_t seed = 0;
  std::uint64_t node_cap = 5'000'000;
  int jobs = 1;
};

struct PhaseRow {
  double r = 0;
  int instances = 0;        // labeled instances (excludes blowups)
  int easy_hard_count = 0;
  double fraction = 0;
  double mean_dfa_states = 0;
  int blowups = 0;

  friend bool operator==(const PhaseRow&, const PhaseRow&) = default;
};

std::vector<PhaseRow> phase_experiment(const PhaseExperimentConfig& config);

// Columns: r, instances, easy_hard_count, fraction, mean_dfa_states.
void emit_phase_csv(const std::vector<PhaseRow>& rows, std::ostream& out);
std::vector<PhaseRow> parse_phase_csv(std::istream& in);

}  // namespace kcl
