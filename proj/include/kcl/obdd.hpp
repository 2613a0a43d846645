#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <unordered_map>
#include <vector>

#include "kcl/cnf.hpp"
#include "kcl/common.hpp"

namespace kcl {

// Variable-to-level permutation. Level 0 is read first.
class VarOrder {
 public:
  VarOrder() = default;
  // Natural order: variable i at level i-1.
  explicit VarOrder(int n);
  // level_to_var[i] is the variable tested at level i; must be a
  // permutation of 1..n.
  static VarOrder from_level_to_var(std::vector<int> level_to_var);

  int num_vars() const { return static_cast<int>(level_to_var_.size()); }
  int level_of(int var) const { return var_to_level_[var - 1]; }
  int var_at(int level) const { return level_to_var_[level]; }

  friend bool operator==(const VarOrder&, const VarOrder&) = default;

 private:
  std::vector<int> var_to_level_;
  std::vector<int> level_to_var_;
};

struct ObddLimits {
  std::uint64_t node_cap = 5'000'000;
  double time_cap_ms = 0.0;  // 0 disables the deadline
};

// Reduced ordered BDD manager with a hash-consed unique table and memoized
// apply. Refs are indices into the manager's arena and are meaningless
// across managers; sweeps run one manager per instance.
class ObddManager {
 public:
  using Ref = std::uint32_t;
  static constexpr Ref kFalse = 0;
  static constexpr Ref kTrue = 1;

  explicit ObddManager(VarOrder order, ObddLimits limits = {});
  explicit ObddManager(int num_vars, ObddLimits limits = {});

  const VarOrder& order() const { return order_; }
  int num_vars() const { return order_.num_vars(); }

  // Canonical node for (var, lo, hi); lo == hi collapses to the child.
  Ref mk_node(int var, Ref lo, Ref hi);
  Ref literal(Lit l);

  Ref apply_and(Ref f, Ref g);
  Ref apply_or(Ref f, Ref g);
  Ref negate(Ref f);

  // Clause-ordered conjunction of clause disjunctions; balanced folds the
  // clause BDDs as a tree instead (robustness checks only, same result).
  Ref compile_cnf(const CnfFormula& f, bool balanced_fold = false);

  // Reachable internal nodes plus reachable terminals; edges = 2 * internal.
  SizeReport node_count(Ref f) const;

  // Exact count of satisfying assignments over n variables; n must be at
  // least the manager's variable count and at most 62.
  std::uint64_t model_count(Ref f, int n) const;

  bool is_terminal(Ref f) const { return f <= kTrue; }
  int var_of(Ref f) const { return order_.var_at(nodes_[f].level); }
  int level_of(Ref f) const { return static_cast<int>(nodes_[f].level); }
  Ref lo(Ref f) const { return nodes_[f].lo; }
  Ref hi(Ref f) const { return nodes_[f].hi; }

  bool eval(Ref f, const std::vector<bool>& assignment) const;

  std::size_t live_nodes() const { return nodes_.size(); }
  void clear_cache();

  void to_dot(Ref f, std::ostream& out) const;

 private:
  struct Node {
    std::uint32_t level;
    Ref lo;
    Ref hi;
  };

  struct UniqueKey {
    std::uint32_t level;
    Ref lo;
    Ref hi;
    friend bool operator==(const UniqueKey&, const UniqueKey&) = default;
  };
  struct UniqueKeyHash {
    std::size_t operator()(const UniqueKey& k) const {
      std::uint64_t h = k.level;
      h = h * 0x9e3779b97f4a7c15ULL + k.lo;
      h = h * 0x9e3779b97f4a7c15ULL + k.hi;
      return static_cast<std::size_t>(h ^ (h >> 32));
    }
  };

  enum class Op : std::uint8_t { And, Or };

  Ref mk_at_level(std::uint32_t level, Ref lo, Ref hi);
  Ref apply(Op op, Ref f, Ref g);
  void check_limits();

  std::vector<Node> nodes_;
  std::unordered_map<UniqueKey, Ref, UniqueKeyHash> unique_;
  std::unordered_map<std::uint64_t, Ref> and_cache_;
  std::unordered_map<std::uint64_t, Ref> or_cache_;
  std::unordered_map<Ref, Ref> not_cache_;
  VarOrder order_;
  ObddLimits limits_;
  std::chrono::steady_clock::time_point start_;
  std::uint32_t limit_check_countdown_ = 0;
};

SizeReport obdd_node_count(const ObddManager& mgr, ObddManager::Ref f);
std::uint64_t obdd_model_count(const ObddManager& mgr, ObddManager::Ref f,
                               int n);
ObddManager::Ref compile_cnf_to_obdd(ObddManager& mgr, const CnfFormula& f,
                                     bool balanced_fold = false);

}  // namespace kcl
