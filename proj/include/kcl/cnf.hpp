#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kcl/common.hpp"
#include "kcl/rng.hpp"

namespace kcl {

// A literal over a 1-based variable index.
struct Lit {
  int var = 0;
  bool neg = false;

  int to_dimacs() const { return neg ? -var : var; }
  static Lit from_dimacs(int code) {
    return Lit{code < 0 ? -code : code, code < 0};
  }

  friend auto operator<=>(const Lit&, const Lit&) = default;
};

struct Clause {
  std::vector<Lit> lits;

  std::size_t size() const { return lits.size(); }
  // True iff no variable occurs twice.
  bool vars_distinct() const;

  friend bool operator==(const Clause&, const Clause&) = default;
};

// CNF over variables 1..num_vars. Duplicate clauses are allowed: the random
// model draws clauses independently.
struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

// Parameters of the random k-SAT model: m clauses, each over k distinct
// variables with fair signs.
struct GenParams {
  int k = 3;
  int n = 0;
  long m = 0;
  std::uint64_t seed = 0;

  static GenParams with_ratio(int k, int n, double r, std::uint64_t seed);
};

// Sorted (variable, value) pairs; at most one entry per variable.
class PartialAssignment {
 public:
  PartialAssignment() = default;

  // Inserts or overwrites the value of var.
  void set(int var, bool value);
  std::optional<bool> get(int var) const;
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const std::vector<std::pair<int, bool>>& pairs() const { return pairs_; }

  friend bool operator==(const PartialAssignment&,
                         const PartialAssignment&) = default;

 private:
  std::vector<std::pair<int, bool>> pairs_;
};

// One clause of the random model: k variables drawn without replacement,
// each negated with probability 1/2.
Clause random_clause(int k, int n, Rng& rng);

// The full model: m independent clauses. Throws std::invalid_argument on
// k > n or other bad parameters. Pure in params (the seed pins everything).
CnfFormula generate_instance(const GenParams& params);

CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(const std::string& text);
void emit_dimacs(const CnfFormula& f, std::ostream& out);
std::string emit_dimacs(const CnfFormula& f);

// The partial assignment falsifying the clause: positive literals map to 0,
// negative to 1.
PartialAssignment adjoint_nogood(const Clause& c);

// Total assignment with one bit per variable at index var-1. Throws
// std::invalid_argument when the assignment does not cover all variables.
bool evaluate(const CnfFormula& f, const std::vector<bool>& assignment);

inline constexpr int kDefaultOracleCap = 24;

// Exact model count by enumerating all 2^n assignments. Refuses n over the
// cap; the enumeration oracle is meant for desk-scale cross-checks only.
std::uint64_t brute_force_count(const CnfFormula& f,
                                int oracle_cap = kDefaultOracleCap);

// Membership bitset over all 2^n assignments: bit of index a is set iff the
// assignment with variable v at bit v-1 of a is a model. Same cap.
std::vector<bool> model_bitset(const CnfFormula& f,
                               int oracle_cap = kDefaultOracleCap);

}  // namespace kcl
