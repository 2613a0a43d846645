#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>
#include <stdexcept>

#include "kcl/cnf.hpp"
#include "kcl/rng.hpp"
#include "test_util.hpp"

using namespace kcl;

TEST_CASE("dimacs literal codes round-trip") {
  CHECK(Lit{4, false}.to_dimacs() == 4);
  CHECK(Lit{4, true}.to_dimacs() == -4);
  CHECK(Lit::from_dimacs(-7) == Lit{7, true});
  CHECK(Lit::from_dimacs(7) == Lit{7, false});
}

TEST_CASE("random clauses have k distinct in-range variables") {
  Rng rng(123);
  for (int i = 0; i < 1000; ++i) {
    const Clause c = random_clause(3, 10, rng);
    CHECK(c.size() == 3);
    CHECK(c.vars_distinct());
    for (const Lit& lit : c.lits) {
      CHECK(lit.var >= 1);
      CHECK(lit.var <= 10);
    }
  }
}

TEST_CASE("clause model hits fair signs and uniform variables") {
  Rng rng(2024);
  const int draws = 20000, k = 3, n = 10;
  int negs = 0;
  std::vector<int> var_hits(n + 1, 0);
  for (int i = 0; i < draws; ++i) {
    const Clause c = random_clause(k, n, rng);
    for (const Lit& lit : c.lits) {
      if (lit.neg) ++negs;
      ++var_hits[lit.var];
    }
  }
  const double neg_fraction = static_cast<double>(negs) / (draws * k);
  CHECK(neg_fraction > 0.48);
  CHECK(neg_fraction < 0.52);
  // Each variable lands in a clause with probability k/n = 0.3; the bounds
  // sit past four standard deviations of the 20000-draw estimate.
  for (int v = 1; v <= n; ++v) {
    const double frequency = static_cast<double>(var_hits[v]) / draws;
    CHECK(frequency > 0.285);
    CHECK(frequency < 0.315);
  }
}

TEST_CASE("generator is pure in its parameters") {
  const GenParams p{3, 12, 30, 99};
  const CnfFormula a = generate_instance(p);
  CHECK(a == generate_instance(p));
  CHECK(a.num_vars == 12);
  CHECK(a.clauses.size() == 30);
  GenParams q = p;
  q.seed = 100;
  CHECK(!(a == generate_instance(q)));
}

TEST_CASE("with_ratio rounds m to the nearest clause count") {
  CHECK(GenParams::with_ratio(3, 20, 1.8, 0).m == 36);
  CHECK(GenParams::with_ratio(3, 12, 0.1, 0).m == 1);
  CHECK(GenParams::with_ratio(3, 25, 0.22, 0).m == 6);
  CHECK(GenParams::with_ratio(3, 20, 0.0, 0).m == 0);
}

TEST_CASE("generator rejects bad parameters") {
  CHECK_THROWS_AS(generate_instance(GenParams{4, 3, 1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(GenParams{0, 3, 1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(GenParams{2, 0, 1, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_instance(GenParams{2, 3, -1, 0}),
                  std::invalid_argument);
}

TEST_CASE("generator output is frozen across releases") {
  // Sweeps cite (seed, k, n, m) tuples as the reproducibility contract, so
  // the literal byte stream below must never change.
  CHECK(emit_dimacs(generate_instance(GenParams{3, 6, 4, 42})) ==
        "p cnf 6 4\n"
        "-1 2 4 0\n"
        "5 2 -6 0\n"
        "-1 -6 5 0\n"
        "2 6 4 0\n");
  CHECK(emit_dimacs(generate_instance(GenParams{2, 5, 3, 7})) ==
        "p cnf 5 3\n"
        "-1 -4 0\n"
        "2 -3 0\n"
        "-2 -4 0\n");
}

TEST_CASE("dimacs emit/parse round trip") {
  const CnfFormula f = generate_instance(GenParams{3, 8, 12, 7});
  CHECK(parse_dimacs(emit_dimacs(f)) == f);

  const CnfFormula empty{4, {}};
  CHECK(parse_dimacs(emit_dimacs(empty)) == empty);
}

TEST_CASE("dimacs parser accepts comments and loose whitespace") {
  const CnfFormula f = parse_dimacs(
      "c a comment\n"
      "\n"
      "p cnf 3 2\n"
      "1 -2 0  3 0\n"
      "c trailing comment\n");
  CHECK(f.num_vars == 3);
  REQUIRE(f.clauses.size() == 2);
  CHECK(f.clauses[0] == Clause{{Lit{1, false}, Lit{2, true}}});
  CHECK(f.clauses[1] == Clause{{Lit{3, false}}});
}

TEST_CASE("dimacs parser reports the offending line") {
  try {
    parse_dimacs("c hi\nq cnf 2 1\n1 2 0\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 2);
  }
  try {
    parse_dimacs("p cnf 2 1\n1 3 0\n");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2\n"), parse_error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 2\n1 0\n"), parse_error);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 0\n"), parse_error);
}

TEST_CASE("adjoint nogood falsifies exactly its clause") {
  const Clause c{{Lit{1, false}, Lit{2, true}, Lit{3, false}}};
  const PartialAssignment nogood = adjoint_nogood(c);
  CHECK(nogood.size() == 3);
  CHECK(nogood.get(1).value() == false);
  CHECK(nogood.get(2).value() == true);
  CHECK(nogood.get(3).value() == false);

  // The nogood is the unique assignment over the clause's variables that
  // falsifies it.
  for (std::uint64_t a = 0; a < 8; ++a) {
    bool matches_nogood = true;
    for (const auto& [var, value] : nogood.pairs())
      if ((((a >> (var - 1)) & 1) != 0) != value) matches_nogood = false;
    CHECK(testutil::clause_satisfied(c, a) == !matches_nogood);
  }
}

TEST_CASE("evaluate agrees with the independent evaluator") {
  const CnfFormula f = generate_instance(GenParams{3, 6, 10, 11});
  for (std::uint64_t a = 0; a < 64; ++a) {
    std::vector<bool> bits(6);
    for (int v = 1; v <= 6; ++v) bits[v - 1] = ((a >> (v - 1)) & 1) != 0;
    CHECK(evaluate(f, bits) == testutil::formula_satisfied(f, a));
  }
  CHECK_THROWS_AS(evaluate(f, std::vector<bool>(5)), std::invalid_argument);
}

TEST_CASE("brute-force count on closed forms") {
  CHECK(brute_force_count(CnfFormula{3, {}}) == 8);

  // One k-clause removes exactly the 2^(n-k) falsifying assignments.
  const CnfFormula one_clause{
      5, {Clause{{Lit{1, false}, Lit{2, true}, Lit{4, false}}}}};
  CHECK(brute_force_count(one_clause) == 32 - 4);

  const CnfFormula contradiction{
      2, {Clause{{Lit{1, false}}}, Clause{{Lit{1, true}}}}};
  CHECK(brute_force_count(contradiction) == 0);

  CHECK_THROWS_AS(brute_force_count(CnfFormula{25, {}}),
                  std::invalid_argument);
}

TEST_CASE("model bitset matches the truth-table oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CnfFormula f =
        generate_instance(GenParams{3, 8, static_cast<long>(4 + seed), seed});
    const std::vector<bool> expected = testutil::truth_table(f);
    CHECK(model_bitset(f) == expected);
    CHECK(brute_force_count(f) == testutil::count_true(expected));
  }
}

TEST_CASE("partial assignments keep sorted unique pairs") {
  PartialAssignment pa;
  pa.set(3, true);
  pa.set(1, false);
  pa.set(3, false);
  REQUIRE(pa.size() == 2);
  CHECK(pa.pairs()[0] == std::pair<int, bool>{1, false});
  CHECK(pa.pairs()[1] == std::pair<int, bool>{3, false});
  CHECK(!pa.get(2).has_value());
}

TEST_CASE("derived seeds separate contexts") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(2, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {2, 3, 0}));
  CHECK(derive_seed(1, {}) != derive_seed(2, {}));
}
