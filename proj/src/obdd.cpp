#include "kcl/obdd.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace kcl {

VarOrder::VarOrder(int n) {
  if (n < 0) throw std::invalid_argument("variable count must be nonnegative");
  level_to_var_.resize(n);
  std::iota(level_to_var_.begin(), level_to_var_.end(), 1);
  var_to_level_.resize(n);
  std::iota(var_to_level_.begin(), var_to_level_.end(), 0);
}

VarOrder VarOrder::from_level_to_var(std::vector<int> level_to_var) {
  const int n = static_cast<int>(level_to_var.size());
  std::vector<int> var_to_level(n, -1);
  for (int level = 0; level < n; ++level) {
    const int var = level_to_var[level];
    if (var < 1 || var > n || var_to_level[var - 1] != -1)
      throw std::invalid_argument("order is not a permutation of 1..n");
    var_to_level[var - 1] = level;
  }
  VarOrder order;
  order.level_to_var_ = std::move(level_to_var);
  order.var_to_level_ = std::move(var_to_level);
  return order;
}

ObddManager::ObddManager(VarOrder order, ObddLimits limits)
    : order_(std::move(order)),
      limits_(limits),
      start_(std::chrono::steady_clock::now()) {
  const auto terminal_level = static_cast<std::uint32_t>(order_.num_vars());
  nodes_.push_back({terminal_level, kFalse, kFalse});  // FALSE
  nodes_.push_back({terminal_level, kTrue, kTrue});    // TRUE
}

ObddManager::ObddManager(int num_vars, ObddLimits limits)
    : ObddManager(VarOrder(num_vars), limits) {}

void ObddManager::check_limits() {
  if (nodes_.size() > limits_.node_cap)
    throw resource_limit_error(resource_limit_error::Kind::node_cap,
                               "OBDD node cap exceeded");
  if (limits_.time_cap_ms > 0 && limit_check_countdown_-- == 0) {
    limit_check_countdown_ = 4096;
    const auto elapsed = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - start_);
    if (elapsed.count() > limits_.time_cap_ms)
      throw resource_limit_error(resource_limit_error::Kind::time_cap,
                                 "OBDD time cap exceeded");
  }
}

ObddManager::Ref ObddManager::mk_at_level(std::uint32_t level, Ref lo,
                                          Ref hi) {
  if (lo == hi) return lo;
  const UniqueKey key{level, lo, hi};
  auto it = unique_.find(key);
  if (it != unique_.end()) return it->second;
  check_limits();
  const Ref ref = static_cast<Ref>(nodes_.size());
  nodes_.push_back({level, lo, hi});
  unique_.emplace(key, ref);
  return ref;
}

ObddManager::Ref ObddManager::mk_node(int var, Ref lo, Ref hi) {
  if (var < 1 || var > num_vars())
    throw std::invalid_argument("variable out of range");
  const auto level = static_cast<std::uint32_t>(order_.level_of(var));
  if (nodes_[lo].level <= level || nodes_[hi].level <= level)
    throw std::invalid_argument("children must sit at later levels");
  return mk_at_level(level, lo, hi);
}

ObddManager::Ref ObddManager::literal(Lit l) {
  return l.neg ? mk_node(l.var, kTrue, kFalse) : mk_node(l.var, kFalse, kTrue);
}

ObddManager::Ref ObddManager::apply(Op op, Ref f, Ref g) {
  // Terminal shortcuts.
  if (op == Op::And) {
    if (f == g) return f;
    if (f == kFalse || g == kFalse) return kFalse;
    if (f == kTrue) return g;
    if (g == kTrue) return f;
  } else {
    if (f == g) return f;
    if (f == kTrue || g == kTrue) return kTrue;
    if (f == kFalse) return g;
    if (g == kFalse) return f;
  }
  if (f > g) std::swap(f, g);  // both ops commute
  auto& cache = op == Op::And ? and_cache_ : or_cache_;
  const std::uint64_t key = (std::uint64_t(f) << 32) | g;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::uint32_t fl = nodes_[f].level;
  const std::uint32_t gl = nodes_[g].level;
  const std::uint32_t level = std::min(fl, gl);
  const Ref f0 = fl == level ? nodes_[f].lo : f;
  const Ref f1 = fl == level ? nodes_[f].hi : f;
  const Ref g0 = gl == level ? nodes_[g].lo : g;
  const Ref g1 = gl == level ? nodes_[g].hi : g;
  const Ref lo = apply(op, f0, g0);
  const Ref hi = apply(op, f1, g1);
  const Ref result = mk_at_level(level, lo, hi);
  cache.emplace(key, result);
  return result;
}

ObddManager::Ref ObddManager::apply_and(Ref f, Ref g) {
  return apply(Op::And, f, g);
}

ObddManager::Ref ObddManager::apply_or(Ref f, Ref g) {
  return apply(Op::Or, f, g);
}

ObddManager::Ref ObddManager::negate(Ref f) {
  if (f == kFalse) return kTrue;
  if (f == kTrue) return kFalse;
  auto it = not_cache_.find(f);
  if (it != not_cache_.end()) return it->second;
  const Ref result =
      mk_at_level(nodes_[f].level, negate(nodes_[f].lo), negate(nodes_[f].hi));
  not_cache_.emplace(f, result);
  return result;
}

namespace {

// Disjunction of the clause's literal functions, built bottom-up so each
// mk_node sees children at strictly later levels.
ObddManager::Ref clause_to_obdd(ObddManager& mgr, const Clause& c) {
  std::vector<Lit> lits = c.lits;
  std::sort(lits.begin(), lits.end(), [&](const Lit& a, const Lit& b) {
    return mgr.order().level_of(a.var) > mgr.order().level_of(b.var);
  });
  ObddManager::Ref acc = ObddManager::kFalse;
  for (const Lit& l : lits) {
    acc = l.neg ? mgr.mk_node(l.var, ObddManager::kTrue, acc)
                : mgr.mk_node(l.var, acc, ObddManager::kTrue);
  }
  return acc;
}

}  // namespace

ObddManager::Ref ObddManager::compile_cnf(const CnfFormula& f,
                                          bool balanced_fold) {
  if (f.num_vars > num_vars())
    throw std::invalid_argument("formula has more variables than the order");
  for (const Clause& c : f.clauses)
    for (const Lit& l : c.lits)
      if (l.var < 1 || l.var > f.num_vars)
        throw std::invalid_argument("literal variable out of range");

  if (!balanced_fold) {
    Ref acc = kTrue;
    for (const Clause& c : f.clauses) acc = apply_and(acc, clause_to_obdd(*this, c));
    return acc;
  }
  if (f.clauses.empty()) return kTrue;
  std::vector<Ref> layer;
  layer.reserve(f.clauses.size());
  for (const Clause& c : f.clauses) layer.push_back(clause_to_obdd(*this, c));
  while (layer.size() > 1) {
    std::vector<Ref> next;
    next.reserve((layer.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < layer.size(); i += 2)
      next.push_back(apply_and(layer[i], layer[i + 1]));
    if (layer.size() % 2) next.push_back(layer.back());
    layer = std::move(next);
  }
  return layer[0];
}

SizeReport ObddManager::node_count(Ref f) const {
  std::unordered_set<Ref> seen;
  std::vector<Ref> stack{f};
  std::uint64_t internal = 0;
  std::uint64_t terminals = 0;
  while (!stack.empty()) {
    const Ref r = stack.back();
    stack.pop_back();
    if (!seen.insert(r).second) continue;
    if (is_terminal(r)) {
      ++terminals;
    } else {
      ++internal;
      stack.push_back(nodes_[r].lo);
      stack.push_back(nodes_[r].hi);
    }
  }
  return SizeReport{internal + terminals, 2 * internal};
}

std::uint64_t ObddManager::model_count(Ref f, int n) const {
  if (n < num_vars())
    throw std::invalid_argument("n smaller than the manager's variable count");
  if (n > 62) throw std::invalid_argument("model count supports n <= 62");
  if (f == kFalse) return 0;
  // counts[r] = models of r over the variables at levels level(r)..n-1,
  // using the manager's own level for terminals (num_vars).
  std::unordered_map<Ref, std::uint64_t> counts;
  counts.emplace(kTrue, std::uint64_t(1) << (n - num_vars()));
  counts.emplace(kFalse, 0);

  // Iterative post-order.
  std::vector<std::pair<Ref, bool>> stack{{f, false}};
  while (!stack.empty()) {
    auto [r, expanded] = stack.back();
    stack.pop_back();
    if (counts.count(r)) continue;
    if (!expanded) {
      stack.push_back({r, true});
      stack.push_back({nodes_[r].lo, false});
      stack.push_back({nodes_[r].hi, false});
      continue;
    }
    const Node& nd = nodes_[r];
    const std::uint64_t lo_count =
        counts.at(nd.lo) << (nodes_[nd.lo].level - nd.level - 1);
    const std::uint64_t hi_count =
        counts.at(nd.hi) << (nodes_[nd.hi].level - nd.level - 1);
    counts.emplace(r, lo_count + hi_count);
  }
  return counts.at(f) << nodes_[f].level;
}

bool ObddManager::eval(Ref f, const std::vector<bool>& assignment) const {
  while (!is_terminal(f)) {
    const Node& nd = nodes_[f];
    f = assignment[order_.var_at(nd.level) - 1] ? nd.hi : nd.lo;
  }
  return f == kTrue;
}

void ObddManager::clear_cache() {
  and_cache_.clear();
  or_cache_.clear();
  not_cache_.clear();
}

void ObddManager::to_dot(Ref f, std::ostream& out) const {
  out << "digraph obdd {\n";
  std::unordered_set<Ref> seen;
  std::vector<Ref> stack{f};
  while (!stack.empty()) {
    const Ref r = stack.back();
    stack.pop_back();
    if (!seen.insert(r).second) continue;
    if (is_terminal(r)) {
      out << "  n" << r << " [shape=box,label=\"" << (r == kTrue ? "1" : "0")
          << "\"];\n";
      continue;
    }
    out << "  n" << r << " [label=\"x" << var_of(r) << "\"];\n";
    out << "  n" << r << " -> n" << nodes_[r].hi << ";\n";
    out << "  n" << r << " -> n" << nodes_[r].lo << " [style=dashed];\n";
    stack.push_back(nodes_[r].lo);
    stack.push_back(nodes_[r].hi);
  }
  out << "}\n";
}

SizeReport obdd_node_count(const ObddManager& mgr, ObddManager::Ref f) {
  return mgr.node_count(f);
}

std::uint64_t obdd_model_count(const ObddManager& mgr, ObddManager::Ref f,
                               int n) {
  return mgr.model_count(f, n);
}

ObddManager::Ref compile_cnf_to_obdd(ObddManager& mgr, const CnfFormula& f,
                                     bool balanced_fold) {
  return mgr.compile_cnf(f, balanced_fold);
}

}  // namespace kcl
