#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "kcl/cnf.hpp"
#include "kcl/common.hpp"

namespace kcl {

// Decision-DNNF: a DAG whose internal nodes are decomposable conjunctions
// and decision nodes (v ? hi : lo) with implicit branch literals, i.e.
// (!v & lo) | (v & hi).  Raw disjunction nodes exist only so the structural
// checkers have something to reject; the compiler never emits them.
enum class DnnfKind : std::uint8_t { False, True, Literal, And, Or, Decision };

struct DnnfNode {
  DnnfKind kind = DnnfKind::False;
  int var = 0;                      // Literal, Decision
  bool neg = false;                 // Literal
  std::vector<std::uint32_t> kids;  // And, Or
  std::uint32_t lo = 0, hi = 0;     // Decision
};

class DnnfDag {
 public:
  using Ref = std::uint32_t;
  static constexpr Ref kFalse = 0;
  static constexpr Ref kTrue = 1;

  DnnfDag();

  // Factories hash-cons, so structurally equal nodes share one id.
  Ref literal(Lit lit);
  // Drops true children, collapses to false on a false child, splices
  // nested conjunctions flat; empty becomes true, singleton becomes the kid.
  Ref conj(std::vector<Ref> kids);
  // decision(v, false, false) collapses to false.
  Ref decision(int var, Ref lo, Ref hi);
  // Raw disjunction, kept verbatim apart from sorting; empty becomes false.
  Ref disj(std::vector<Ref> kids);

  const DnnfNode& node(Ref r) const { return nodes_.at(r); }
  std::size_t size() const { return nodes_.size(); }

  // Compiler hook: total arena size limit, checked on node creation.
  void set_node_cap(std::uint64_t cap) { node_cap_ = cap; }

 private:
  Ref intern(DnnfNode n);

  std::vector<DnnfNode> nodes_;
  std::map<std::pair<int, bool>, Ref> literal_ids_;
  std::map<std::tuple<int, Ref, Ref>, Ref> decision_ids_;
  std::map<std::pair<bool, std::vector<Ref>>, Ref> list_ids_;  // (is_or, kids)
  std::uint64_t node_cap_ = 0;  // 0 = unlimited
};

struct DnnfCompileOptions {
  std::uint64_t node_cap = 5'000'000;
  std::uint64_t time_cap_ms = 0;  // 0 = unlimited
  bool component_cache = true;
  enum class Branch { LowestIndex, MostOccurrences };
  Branch branch = Branch::LowestIndex;
};

// Exhaustive DPLL with unit propagation, connected-component decomposition,
// and (optionally) caching of residual subformulas.  Returns the root node.
DnnfDag::Ref compile_cnf_to_dnnf(const CnfFormula& f, DnnfDag& dag,
                                 const DnnfCompileOptions& opts = {});

// Nodes reachable from root (terminals included) and the child references
// among them.
SizeReport dnnf_node_count(const DnnfDag& dag, DnnfDag::Ref root);

// Models over num_vars variables; requires num_vars <= 62 and assumes the
// DAG passes both structural checks below.
std::uint64_t dnnf_model_count(const DnnfDag& dag, DnnfDag::Ref root,
                               int num_vars);

// Conjunctions (explicit and the implicit branch-literal ones inside
// decision nodes) must have pairwise variable-disjoint children.
bool check_decomposability(const DnnfDag& dag, DnnfDag::Ref root);

// Disjuncts may not share models.  Decision nodes guarantee this through
// the branch literal as long as neither branch mentions the decision
// variable; raw disjunctions carry no such guarantee and are rejected.
bool check_determinism(const DnnfDag& dag, DnnfDag::Ref root);

bool dnnf_eval(const DnnfDag& dag, DnnfDag::Ref root,
               const std::vector<bool>& assignment);

// c2d-style text format: "nnf <nodes> <edges> <vars>" then one node per
// line (L lit | A c kids | O j c kids), children before parents.  Decision
// nodes expand into a disjunction of explicit conjunctions.
void export_nnf(const DnnfDag& dag, DnnfDag::Ref root, int num_vars,
                std::ostream& out);

}  // namespace kcl
