#include "kcl/cnf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace kcl {

bool Clause::vars_distinct() const {
  std::vector<int> vars;
  vars.reserve(lits.size());
  for (const Lit& l : lits) vars.push_back(l.var);
  std::sort(vars.begin(), vars.end());
  return std::adjacent_find(vars.begin(), vars.end()) == vars.end();
}

GenParams GenParams::with_ratio(int k, int n, double r, std::uint64_t seed) {
  return GenParams{k, n, std::lround(r * n), seed};
}

void PartialAssignment::set(int var, bool value) {
  auto it = std::lower_bound(
      pairs_.begin(), pairs_.end(), var,
      [](const std::pair<int, bool>& p, int v) { return p.first < v; });
  if (it != pairs_.end() && it->first == var) {
    it->second = value;
  } else {
    pairs_.insert(it, {var, value});
  }
}

std::optional<bool> PartialAssignment::get(int var) const {
  auto it = std::lower_bound(
      pairs_.begin(), pairs_.end(), var,
      [](const std::pair<int, bool>& p, int v) { return p.first < v; });
  if (it != pairs_.end() && it->first == var) return it->second;
  return std::nullopt;
}

Clause random_clause(int k, int n, Rng& rng) {
  // Partial Fisher-Yates: the first k slots end up a uniform ordered
  // k-subset of 1..n.
  std::vector<int> vars(n);
  std::iota(vars.begin(), vars.end(), 1);
  Clause c;
  c.lits.reserve(k);
  for (int j = 0; j < k; ++j) {
    const int pick = j + static_cast<int>(rng.below(n - j));
    std::swap(vars[j], vars[pick]);
    c.lits.push_back(Lit{vars[j], rng.bit()});
  }
  return c;
}

CnfFormula generate_instance(const GenParams& params) {
  if (params.n < 1) throw std::invalid_argument("n must be at least 1");
  if (params.k < 1) throw std::invalid_argument("k must be at least 1");
  if (params.k > params.n)
    throw std::invalid_argument("clause length k exceeds variable count n");
  if (params.m < 0) throw std::invalid_argument("m must be nonnegative");

  Rng rng(params.seed);
  CnfFormula f;
  f.num_vars = params.n;
  f.clauses.reserve(params.m);
  for (long i = 0; i < params.m; ++i)
    f.clauses.push_back(random_clause(params.k, params.n, rng));
  return f;
}

namespace {

// Whitespace-separated tokens with the 1-based line each came from.
struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::istream& in) {
  std::vector<Token> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (ls >> tok) {
      if (tok == "c" || tok[0] == 'c') continue;  // comment line
      out.push_back({tok, lineno});
      while (ls >> tok) out.push_back({tok, lineno});
    }
  }
  return out;
}

int parse_int(const Token& t, const char* what) {
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(t.text, &pos);
  } catch (const std::exception&) {
    throw parse_error(t.line, std::string("expected ") + what + ", got '" +
                                  t.text + "'");
  }
  if (pos != t.text.size())
    throw parse_error(t.line, std::string("expected ") + what + ", got '" +
                                  t.text + "'");
  return value;
}

}  // namespace

CnfFormula parse_dimacs(std::istream& in) {
  const std::vector<Token> toks = tokenize(in);
  std::size_t i = 0;

  if (toks.size() < 4 || toks[0].text != "p" || toks[1].text != "cnf")
    throw parse_error(toks.empty() ? 1 : toks[0].line,
                      "malformed header, expected 'p cnf <vars> <clauses>'");
  const int header_line = toks[0].line;
  const int num_vars = parse_int(toks[2], "variable count");
  const int num_clauses = parse_int(toks[3], "clause count");
  if (num_vars < 0 || num_clauses < 0)
    throw parse_error(header_line, "negative counts in header");
  i = 4;

  CnfFormula f;
  f.num_vars = num_vars;
  Clause current;
  int last_line = header_line;
  while (i < toks.size()) {
    const Token& t = toks[i++];
    last_line = t.line;
    const int code = parse_int(t, "literal");
    if (code == 0) {
      f.clauses.push_back(std::move(current));
      current = Clause{};
      continue;
    }
    const int var = code < 0 ? -code : code;
    if (var > num_vars)
      throw parse_error(t.line, "literal index " + std::to_string(var) +
                                    " out of range (header declares " +
                                    std::to_string(num_vars) + " variables)");
    current.lits.push_back(Lit::from_dimacs(code));
  }
  if (!current.lits.empty())
    throw parse_error(last_line, "clause missing terminating 0");
  if (static_cast<int>(f.clauses.size()) != num_clauses)
    throw parse_error(last_line,
                      "header declares " + std::to_string(num_clauses) +
                          " clauses, found " + std::to_string(f.clauses.size()));
  return f;
}

CnfFormula parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

void emit_dimacs(const CnfFormula& f, std::ostream& out) {
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const Clause& c : f.clauses) {
    for (const Lit& l : c.lits) out << l.to_dimacs() << ' ';
    out << "0\n";
  }
}

std::string emit_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  emit_dimacs(f, out);
  return out.str();
}

PartialAssignment adjoint_nogood(const Clause& c) {
  PartialAssignment pa;
  for (const Lit& l : c.lits) pa.set(l.var, l.neg);
  return pa;
}

bool evaluate(const CnfFormula& f, const std::vector<bool>& assignment) {
  if (static_cast<int>(assignment.size()) != f.num_vars)
    throw std::invalid_argument("assignment must cover all " +
                                std::to_string(f.num_vars) + " variables");
  for (const Clause& c : f.clauses) {
    bool sat = false;
    for (const Lit& l : c.lits) {
      if (assignment[l.var - 1] != l.neg) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

namespace {

struct ClauseMasks {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
};

std::vector<ClauseMasks> clause_masks(const CnfFormula& f, int oracle_cap,
                                      const char* op) {
  if (f.num_vars > oracle_cap)
    throw std::invalid_argument(std::string(op) + ": n=" +
                                std::to_string(f.num_vars) +
                                " exceeds the oracle cap of " +
                                std::to_string(oracle_cap));
  std::vector<ClauseMasks> masks;
  masks.reserve(f.clauses.size());
  for (const Clause& c : f.clauses) {
    ClauseMasks m;
    for (const Lit& l : c.lits) {
      if (l.var < 1 || l.var > f.num_vars)
        throw std::invalid_argument("literal variable out of range");
      const std::uint32_t bit = std::uint32_t(1) << (l.var - 1);
      if (l.neg)
        m.neg |= bit;
      else
        m.pos |= bit;
    }
    masks.push_back(m);
  }
  return masks;
}

}  // namespace

std::uint64_t brute_force_count(const CnfFormula& f, int oracle_cap) {
  const auto masks = clause_masks(f, oracle_cap, "brute_force_count");
  const std::uint64_t total = std::uint64_t(1) << f.num_vars;
  std::uint64_t count = 0;
  for (std::uint64_t a = 0; a < total; ++a) {
    bool sat = true;
    for (const ClauseMasks& m : masks) {
      if ((a & m.pos) == 0 && (~a & m.neg) == 0) {
        sat = false;
        break;
      }
    }
    count += sat;
  }
  return count;
}

std::vector<bool> model_bitset(const CnfFormula& f, int oracle_cap) {
  const auto masks = clause_masks(f, oracle_cap, "model_bitset");
  const std::uint64_t total = std::uint64_t(1) << f.num_vars;
  std::vector<bool> member(total, true);
  for (std::uint64_t a = 0; a < total; ++a) {
    for (const ClauseMasks& m : masks) {
      if ((a & m.pos) == 0 && (~a & m.neg) == 0) {
        member[a] = false;
        break;
      }
    }
  }
  return member;
}

}  // namespace kcl
