#include "kcl/dnnf.hpp"

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace kcl {

DnnfDag::DnnfDag() {
  nodes_.push_back(DnnfNode{DnnfKind::False, 0, false, {}, 0, 0});
  nodes_.push_back(DnnfNode{DnnfKind::True, 0, false, {}, 0, 0});
}

DnnfDag::Ref DnnfDag::intern(DnnfNode n) {
  if (node_cap_ != 0 && nodes_.size() >= node_cap_)
    throw resource_limit_error(resource_limit_error::Kind::node_cap,
                               "DNNF node cap exceeded");
  nodes_.push_back(std::move(n));
  return static_cast<Ref>(nodes_.size() - 1);
}

DnnfDag::Ref DnnfDag::literal(Lit lit) {
  if (lit.var < 1) throw std::invalid_argument("literal variable must be >= 1");
  auto [it, inserted] = literal_ids_.emplace(
      std::make_pair(lit.var, lit.neg), static_cast<Ref>(0));
  if (inserted)
    it->second = intern(DnnfNode{DnnfKind::Literal, lit.var, lit.neg, {}, 0, 0});
  return it->second;
}

DnnfDag::Ref DnnfDag::conj(std::vector<Ref> kids) {
  std::vector<Ref> flat;
  flat.reserve(kids.size());
  for (Ref k : kids) {
    if (k == kFalse) return kFalse;
    if (k == kTrue) continue;
    if (node(k).kind == DnnfKind::And) {
      const auto& sub = node(k).kids;
      flat.insert(flat.end(), sub.begin(), sub.end());
    } else {
      flat.push_back(k);
    }
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return kTrue;
  if (flat.size() == 1) return flat[0];
  auto [it, inserted] = list_ids_.emplace(std::make_pair(false, flat),
                                          static_cast<Ref>(0));
  if (inserted)
    it->second = intern(DnnfNode{DnnfKind::And, 0, false, flat, 0, 0});
  return it->second;
}

DnnfDag::Ref DnnfDag::decision(int var, Ref lo, Ref hi) {
  if (var < 1) throw std::invalid_argument("decision variable must be >= 1");
  if (lo == kFalse && hi == kFalse) return kFalse;
  auto [it, inserted] = decision_ids_.emplace(std::make_tuple(var, lo, hi),
                                              static_cast<Ref>(0));
  if (inserted)
    it->second = intern(DnnfNode{DnnfKind::Decision, var, false, {}, lo, hi});
  return it->second;
}

DnnfDag::Ref DnnfDag::disj(std::vector<Ref> kids) {
  std::sort(kids.begin(), kids.end());
  kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  if (kids.empty()) return kFalse;
  auto [it, inserted] = list_ids_.emplace(std::make_pair(true, kids),
                                          static_cast<Ref>(0));
  if (inserted)
    it->second = intern(DnnfNode{DnnfKind::Or, 0, false, kids, 0, 0});
  return it->second;
}

namespace {

// Residual clauses carry literal codes 2*var (positive) / 2*var+1 (negated),
// sorted within a clause; the clause list is sorted by (length, lex) so that
// equal residuals serialize to equal cache keys.
using Code = std::uint32_t;
using Residual = std::vector<std::vector<Code>>;

int code_var(Code c) { return static_cast<int>(c >> 1); }
bool code_neg(Code c) { return (c & 1) != 0; }

void canonicalize(Residual& clauses) {
  std::sort(clauses.begin(), clauses.end(),
            [](const std::vector<Code>& a, const std::vector<Code>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
}

struct ResidualHash {
  std::size_t operator()(const std::vector<Code>& key) const {
    std::uint64_t h = 1469598103934665603ull;
    for (Code c : key) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct DnnfCompiler {
  DnnfDag& dag;
  DnnfCompileOptions opts;
  std::unordered_map<std::vector<Code>, DnnfDag::Ref, ResidualHash> cache;
  std::chrono::steady_clock::time_point deadline;
  int clock_countdown = 0;

  DnnfCompiler(DnnfDag& d, const DnnfCompileOptions& o) : dag(d), opts(o) {
    if (opts.time_cap_ms != 0)
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::milliseconds(opts.time_cap_ms);
  }

  void check_time() {
    if (opts.time_cap_ms == 0 || --clock_countdown > 0) return;
    clock_countdown = 1024;
    if (std::chrono::steady_clock::now() > deadline)
      throw resource_limit_error(resource_limit_error::Kind::time_cap,
                                 "DNNF time cap exceeded");
  }

  DnnfDag::Ref lit_node(Code c) {
    return dag.literal(Lit{code_var(c), code_neg(c)});
  }

  // Applies the given true literals.  Returns false on an emptied clause.
  static bool assign(const Residual& in, const std::vector<Code>& forced,
                     Residual& out) {
    out.clear();
    out.reserve(in.size());
    for (const auto& clause : in) {
      std::vector<Code> rest;
      bool satisfied = false;
      for (Code c : clause) {
        if (std::binary_search(forced.begin(), forced.end(), c)) {
          satisfied = true;
          break;
        }
        if (!std::binary_search(forced.begin(), forced.end(), c ^ 1))
          rest.push_back(c);
      }
      if (satisfied) continue;
      if (rest.empty()) return false;
      out.push_back(std::move(rest));
    }
    canonicalize(out);
    return true;
  }

  static std::vector<Code> cache_key(const Residual& clauses) {
    std::vector<Code> key;
    for (const auto& clause : clauses) {
      key.push_back(static_cast<Code>(clause.size()));
      key.insert(key.end(), clause.begin(), clause.end());
    }
    return key;
  }

  int pick_branch_var(const Residual& clauses) const {
    if (opts.branch == DnnfCompileOptions::Branch::LowestIndex) {
      int best = 0;
      for (const auto& clause : clauses)
        for (Code c : clause)
          if (best == 0 || code_var(c) < best) best = code_var(c);
      return best;
    }
    std::unordered_map<int, int> occurrences;
    for (const auto& clause : clauses)
      for (Code c : clause) ++occurrences[code_var(c)];
    int best = 0, best_count = -1;
    for (const auto& [var, count] : occurrences)
      if (count > best_count || (count == best_count && var < best)) {
        best = var;
        best_count = count;
      }
    return best;
  }

  // Splits the clause list into variable-connected components, preserving
  // clause order; component order follows first appearance.
  static std::vector<Residual> components(const Residual& clauses) {
    std::unordered_map<int, int> var_slot;
    std::vector<int> parent;
    auto slot = [&](int var) {
      auto [it, inserted] =
          var_slot.emplace(var, static_cast<int>(parent.size()));
      if (inserted) parent.push_back(it->second);
      return it->second;
    };
    auto find = [&parent](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& clause : clauses) {
      const int head = slot(code_var(clause[0]));
      for (Code c : clause) parent[find(slot(code_var(c)))] = find(head);
    }
    std::unordered_map<int, int> group_of_root;
    std::vector<Residual> groups;
    for (const auto& clause : clauses) {
      const int root = find(slot(code_var(clause[0])));
      auto [it, inserted] = group_of_root.emplace(
          root, static_cast<int>(groups.size()));
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(clause);
    }
    return groups;
  }

  DnnfDag::Ref compile(Residual clauses) {
    check_time();
    if (clauses.empty()) return DnnfDag::kTrue;

    std::vector<Code> key;
    if (opts.component_cache) {
      key = cache_key(clauses);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }

    DnnfDag::Ref result;
    std::vector<Code> units;
    for (const auto& clause : clauses)
      if (clause.size() == 1) units.push_back(clause[0]);

    if (!units.empty()) {
      std::sort(units.begin(), units.end());
      units.erase(std::unique(units.begin(), units.end()), units.end());
      bool conflict = false;
      for (std::size_t i = 1; i < units.size(); ++i)
        if (units[i] == (units[i - 1] | 1)) conflict = true;
      Residual rest;
      if (conflict || !assign(clauses, units, rest)) {
        result = DnnfDag::kFalse;
      } else {
        std::vector<DnnfDag::Ref> kids;
        kids.reserve(units.size() + 1);
        for (Code u : units) kids.push_back(lit_node(u));
        kids.push_back(compile(std::move(rest)));
        result = dag.conj(std::move(kids));
      }
    } else {
      std::vector<Residual> groups = components(clauses);
      if (groups.size() > 1) {
        std::vector<DnnfDag::Ref> kids;
        kids.reserve(groups.size());
        for (auto& group : groups) kids.push_back(compile(std::move(group)));
        result = dag.conj(std::move(kids));
      } else {
        const int var = pick_branch_var(clauses);
        const Code pos = static_cast<Code>(var) << 1;
        Residual rest;
        DnnfDag::Ref lo = DnnfDag::kFalse, hi = DnnfDag::kFalse;
        if (assign(clauses, {pos | 1}, rest)) lo = compile(std::move(rest));
        if (assign(clauses, {pos}, rest)) hi = compile(std::move(rest));
        result = dag.decision(var, lo, hi);
      }
    }

    if (opts.component_cache) cache.emplace(std::move(key), result);
    return result;
  }
};

}  // namespace

DnnfDag::Ref compile_cnf_to_dnnf(const CnfFormula& f, DnnfDag& dag,
                                 const DnnfCompileOptions& opts) {
  Residual clauses;
  clauses.reserve(f.clauses.size());
  for (const Clause& clause : f.clauses) {
    if (clause.lits.empty()) return DnnfDag::kFalse;
    std::vector<Code> codes;
    codes.reserve(clause.lits.size());
    for (const Lit& lit : clause.lits) {
      if (lit.var < 1 || lit.var > f.num_vars)
        throw std::invalid_argument("literal variable out of range");
      codes.push_back((static_cast<Code>(lit.var) << 1) |
                      (lit.neg ? 1u : 0u));
    }
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    bool tautology = false;
    for (std::size_t i = 1; i < codes.size(); ++i)
      if (codes[i] == (codes[i - 1] | 1)) tautology = true;
    if (!tautology) clauses.push_back(std::move(codes));
  }
  canonicalize(clauses);

  dag.set_node_cap(opts.node_cap);
  DnnfCompiler compiler(dag, opts);
  return compiler.compile(std::move(clauses));
}

namespace {

std::vector<DnnfDag::Ref> reachable_postorder(const DnnfDag& dag,
                                              DnnfDag::Ref root) {
  std::vector<DnnfDag::Ref> order;
  std::vector<char> seen(dag.size(), 0);
  std::vector<std::pair<DnnfDag::Ref, bool>> stack{{root, false}};
  while (!stack.empty()) {
    auto [r, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      order.push_back(r);
      continue;
    }
    if (seen[r]) continue;
    seen[r] = 1;
    stack.push_back({r, true});
    const DnnfNode& n = dag.node(r);
    if (n.kind == DnnfKind::Decision) {
      stack.push_back({n.lo, false});
      stack.push_back({n.hi, false});
    } else {
      for (DnnfDag::Ref k : n.kids) stack.push_back({k, false});
    }
  }
  return order;
}

// Support bitsets, one word per 64 variables, indexed by arena id (filled
// only for reachable nodes).
struct SupportTable {
  int words = 1;
  std::vector<std::uint64_t> bits;  // dag.size() x words

  std::uint64_t* row(DnnfDag::Ref r) { return bits.data() + r * words; }
  const std::uint64_t* row(DnnfDag::Ref r) const {
    return bits.data() + r * words;
  }
  void set(DnnfDag::Ref r, int var) {
    row(r)[(var - 1) / 64] |= 1ull << ((var - 1) % 64);
  }
  bool test(DnnfDag::Ref r, int var) const {
    return (row(r)[(var - 1) / 64] >> ((var - 1) % 64)) & 1;
  }
  void merge(DnnfDag::Ref dst, DnnfDag::Ref src) {
    for (int w = 0; w < words; ++w) row(dst)[w] |= row(src)[w];
  }
  bool overlaps(DnnfDag::Ref a, DnnfDag::Ref b) const {
    for (int w = 0; w < words; ++w)
      if (row(a)[w] & row(b)[w]) return true;
    return false;
  }
};

SupportTable compute_supports(const DnnfDag& dag,
                              const std::vector<DnnfDag::Ref>& postorder) {
  int max_var = 1;
  for (DnnfDag::Ref r : postorder) {
    const DnnfNode& n = dag.node(r);
    if (n.kind == DnnfKind::Literal || n.kind == DnnfKind::Decision)
      max_var = std::max(max_var, n.var);
  }
  SupportTable table;
  table.words = (max_var + 63) / 64;
  table.bits.assign(static_cast<std::size_t>(dag.size()) * table.words, 0);
  for (DnnfDag::Ref r : postorder) {
    const DnnfNode& n = dag.node(r);
    switch (n.kind) {
      case DnnfKind::False:
      case DnnfKind::True:
        break;
      case DnnfKind::Literal:
        table.set(r, n.var);
        break;
      case DnnfKind::And:
      case DnnfKind::Or:
        for (DnnfDag::Ref k : n.kids) table.merge(r, k);
        break;
      case DnnfKind::Decision:
        table.merge(r, n.lo);
        table.merge(r, n.hi);
        table.set(r, n.var);
        break;
    }
  }
  return table;
}

}  // namespace

SizeReport dnnf_node_count(const DnnfDag& dag, DnnfDag::Ref root) {
  SizeReport report;
  for (DnnfDag::Ref r : reachable_postorder(dag, root)) {
    ++report.nodes;
    const DnnfNode& n = dag.node(r);
    if (n.kind == DnnfKind::Decision)
      report.edges += 2;
    else
      report.edges += n.kids.size();
  }
  return report;
}

std::uint64_t dnnf_model_count(const DnnfDag& dag, DnnfDag::Ref root,
                               int num_vars) {
  if (num_vars < 0 || num_vars > 62)
    throw std::invalid_argument("model count supports 0 <= num_vars <= 62");
  const std::vector<DnnfDag::Ref> postorder = reachable_postorder(dag, root);
  std::unordered_map<DnnfDag::Ref, std::pair<std::uint64_t, std::uint64_t>>
      memo;  // ref -> (support mask, models over the support)
  for (DnnfDag::Ref r : postorder) {
    const DnnfNode& n = dag.node(r);
    std::uint64_t mask = 0, count = 0;
    switch (n.kind) {
      case DnnfKind::False:
        break;
      case DnnfKind::True:
        count = 1;
        break;
      case DnnfKind::Literal:
        if (n.var > num_vars)
          throw std::invalid_argument("literal variable exceeds num_vars");
        mask = 1ull << (n.var - 1);
        count = 1;
        break;
      case DnnfKind::And:
        count = 1;
        for (DnnfDag::Ref k : n.kids) {
          const auto& [kmask, kcount] = memo.at(k);
          if (mask & kmask)
            throw invalid_dag_error("conjunction children share variables");
          mask |= kmask;
          count *= kcount;
        }
        break;
      case DnnfKind::Or:
        for (DnnfDag::Ref k : n.kids) mask |= memo.at(k).first;
        for (DnnfDag::Ref k : n.kids) {
          const auto& [kmask, kcount] = memo.at(k);
          count += kcount
                   << (__builtin_popcountll(mask) -
                       __builtin_popcountll(kmask));
        }
        break;
      case DnnfKind::Decision: {
        if (n.var > num_vars)
          throw std::invalid_argument("decision variable exceeds num_vars");
        const auto& [lmask, lcount] = memo.at(n.lo);
        const auto& [hmask, hcount] = memo.at(n.hi);
        const std::uint64_t bit = 1ull << (n.var - 1);
        if ((lmask | hmask) & bit)
          throw invalid_dag_error("decision variable appears in a branch");
        mask = bit | lmask | hmask;
        const int span = __builtin_popcountll(mask) - 1;
        count = (lcount << (span - __builtin_popcountll(lmask))) +
                (hcount << (span - __builtin_popcountll(hmask)));
        break;
      }
    }
    memo[r] = {mask, count};
  }
  const auto& [mask, count] = memo.at(root);
  return count << (num_vars - __builtin_popcountll(mask));
}

bool check_decomposability(const DnnfDag& dag, DnnfDag::Ref root) {
  const std::vector<DnnfDag::Ref> postorder = reachable_postorder(dag, root);
  const SupportTable table = compute_supports(dag, postorder);
  for (DnnfDag::Ref r : postorder) {
    const DnnfNode& n = dag.node(r);
    if (n.kind == DnnfKind::And) {
      // Pairwise disjointness equals "each child disjoint from the union
      // of the previous ones", which the running accumulator checks.
      SupportTable acc;
      acc.words = table.words;
      acc.bits.assign(table.words, 0);
      for (DnnfDag::Ref k : n.kids) {
        for (int w = 0; w < table.words; ++w) {
          if (acc.bits[w] & table.row(k)[w]) return false;
          acc.bits[w] |= table.row(k)[w];
        }
      }
    } else if (n.kind == DnnfKind::Decision) {
      if (table.test(n.lo, n.var) || table.test(n.hi, n.var)) return false;
    }
  }
  return true;
}

bool check_determinism(const DnnfDag& dag, DnnfDag::Ref root) {
  const std::vector<DnnfDag::Ref> postorder = reachable_postorder(dag, root);
  const SupportTable table = compute_supports(dag, postorder);
  for (DnnfDag::Ref r : postorder) {
    const DnnfNode& n = dag.node(r);
    // Raw disjunctions carry no syntactic disjointness guarantee.
    if (n.kind == DnnfKind::Or) return false;
    if (n.kind == DnnfKind::Decision &&
        (table.test(n.lo, n.var) || table.test(n.hi, n.var)))
      return false;
  }
  return true;
}

bool dnnf_eval(const DnnfDag& dag, DnnfDag::Ref root,
               const std::vector<bool>& assignment) {
  const std::vector<DnnfDag::Ref> postorder = reachable_postorder(dag, root);
  std::unordered_map<DnnfDag::Ref, bool> value;
  for (DnnfDag::Ref r : postorder) {
    const DnnfNode& n = dag.node(r);
    bool v = false;
    switch (n.kind) {
      case DnnfKind::False:
        break;
      case DnnfKind::True:
        v = true;
        break;
      case DnnfKind::Literal:
        if (n.var > static_cast<int>(assignment.size()))
          throw std::invalid_argument("assignment too short");
        v = assignment[n.var - 1] != n.neg;
        break;
      case DnnfKind::And:
        v = true;
        for (DnnfDag::Ref k : n.kids) v = v && value.at(k);
        break;
      case DnnfKind::Or:
        for (DnnfDag::Ref k : n.kids) v = v || value.at(k);
        break;
      case DnnfKind::Decision:
        if (n.var > static_cast<int>(assignment.size()))
          throw std::invalid_argument("assignment too short");
        v = assignment[n.var - 1] ? value.at(n.hi) : value.at(n.lo);
        break;
    }
    value[r] = v;
  }
  return value.at(root);
}

namespace {

// Assembles the c2d-style node list.  Decision nodes become disjunctions of
// explicit literal+branch conjunctions; conjunctions with a true branch
// collapse to the bare literal.
struct NnfWriter {
  const DnnfDag& dag;
  std::vector<std::string> lines;
  std::uint64_t edges = 0;
  std::map<std::pair<int, bool>, int> literal_lines;
  std::map<std::pair<int, int>, int> and2_lines;
  std::unordered_map<DnnfDag::Ref, int> emitted;

  int append(std::string line, std::uint64_t added_edges) {
    lines.push_back(std::move(line));
    edges += added_edges;
    return static_cast<int>(lines.size()) - 1;
  }

  int literal_line(int var, bool neg) {
    auto [it, inserted] =
        literal_lines.emplace(std::make_pair(var, neg), 0);
    if (inserted)
      it->second = append("L " + std::to_string(neg ? -var : var), 0);
    return it->second;
  }

  int branch_conj(int lit_line_id, DnnfDag::Ref branch) {
    if (branch == DnnfDag::kTrue) return lit_line_id;
    const int branch_id = emit(branch);
    auto [it, inserted] =
        and2_lines.emplace(std::make_pair(lit_line_id, branch_id), 0);
    if (inserted)
      it->second = append("A 2 " + std::to_string(lit_line_id) + " " +
                              std::to_string(branch_id),
                          2);
    return it->second;
  }

  int emit(DnnfDag::Ref r) {
    auto found = emitted.find(r);
    if (found != emitted.end()) return found->second;
    const DnnfNode& n = dag.node(r);
    int id = -1;
    switch (n.kind) {
      case DnnfKind::False:
        id = append("O 0 0", 0);
        break;
      case DnnfKind::True:
        id = append("A 0", 0);
        break;
      case DnnfKind::Literal:
        id = literal_line(n.var, n.neg);
        break;
      case DnnfKind::And:
      case DnnfKind::Or: {
        std::vector<int> kid_ids;
        kid_ids.reserve(n.kids.size());
        for (DnnfDag::Ref k : n.kids) kid_ids.push_back(emit(k));
        std::string line =
            n.kind == DnnfKind::And ? "A " : "O 0 ";
        line += std::to_string(kid_ids.size());
        for (int k : kid_ids) line += " " + std::to_string(k);
        id = append(std::move(line), kid_ids.size());
        break;
      }
      case DnnfKind::Decision: {
        if (n.lo == DnnfDag::kFalse) {
          id = branch_conj(literal_line(n.var, false), n.hi);
        } else if (n.hi == DnnfDag::kFalse) {
          id = branch_conj(literal_line(n.var, true), n.lo);
        } else {
          const int lo_id = branch_conj(literal_line(n.var, true), n.lo);
          const int hi_id = branch_conj(literal_line(n.var, false), n.hi);
          id = append("O " + std::to_string(n.var) + " 2 " +
                          std::to_string(lo_id) + " " + std::to_string(hi_id),
                      2);
        }
        break;
      }
    }
    emitted[r] = id;
    return id;
  }
};

}  // namespace

void export_nnf(const DnnfDag& dag, DnnfDag::Ref root, int num_vars,
                std::ostream& out) {
  NnfWriter writer{dag, {}, 0, {}, {}, {}};
  writer.emit(root);
  out << "nnf " << writer.lines.size() << ' ' << writer.edges << ' '
      << num_vars << '\n';
  for (const std::string& line : writer.lines) out << line << '\n';
}

}  // namespace kcl
