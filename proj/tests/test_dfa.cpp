#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "kcl/cnf.hpp"
#include "kcl/dfa.hpp"
#include "kcl/obdd.hpp"
#include "kcl/rng.hpp"
#include "test_util.hpp"

using namespace kcl;

namespace {

DfaState mk(std::int32_t zero, std::int32_t one) {
  DfaState s;
  s.next[0] = zero;
  s.next[1] = one;
  return s;
}

// Unit clauses pinning x1..x_fixed to true over n variables.
CnfFormula prefix_units(int n, int fixed) {
  CnfFormula f{n, {}};
  for (int v = 1; v <= fixed; ++v) f.clauses.push_back(Clause{{Lit{v, false}}});
  return f;
}

}  // namespace

TEST_CASE("the full automaton accepts every word") {
  const LevelDfa dfa = full_dfa(3);
  CHECK(well_formed(dfa));
  CHECK(dfa_state_count(dfa) == 4);
  CHECK(accepting_path_count(dfa) == 8);
  CHECK(accepts(dfa, {0, 1, 0}));
  CHECK(accepts(dfa, {1, 1, 1}));
}

TEST_CASE("empty formula and contradiction compile to the two extremes") {
  CHECK(compile_cnf_to_dfa(CnfFormula{5, {}}) == full_dfa(5));

  const CnfFormula unsat{2, {Clause{{Lit{1, false}}}, Clause{{Lit{1, true}}}}};
  const LevelDfa dfa = compile_cnf_to_dfa(unsat);
  CHECK(dfa.empty_language());
  CHECK(dfa_state_count(dfa) == 0);
  CHECK(accepting_path_count(dfa) == 0);
  CHECK(well_formed(dfa));
}

TEST_CASE("compiled automata recognize exactly the models") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 4 + static_cast<int>(seed % 6);
    const CnfFormula f = generate_instance(
        GenParams{3, n, static_cast<long>(2 + seed % 16), 40 + seed});
    const LevelDfa dfa = compile_cnf_to_dfa(f);
    CHECK(well_formed(dfa));
    const std::vector<bool> table = testutil::truth_table(f);
    CHECK(testutil::dfa_language(dfa) == table);
    CHECK(accepting_path_count(dfa) == testutil::count_true(table));
  }
}

TEST_CASE("compilation routes and minimization agree") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const int n = 6;
    const CnfFormula f = generate_instance(
        GenParams{3, n, static_cast<long>(3 + seed), 600 + seed});
    const LevelDfa via_obdd = compile_cnf_to_dfa(f);
    CHECK(via_obdd == compile_cnf_to_dfa_incremental(f, VarOrder(n)));
    // The construction is already minimal-canonical, so minimize is a no-op.
    CHECK(minimize(via_obdd) == via_obdd);
  }
}

TEST_CASE("custom orders relabel levels without changing the language") {
  const CnfFormula f = generate_instance(GenParams{3, 5, 7, 21});
  const VarOrder order = VarOrder::from_level_to_var({3, 5, 1, 4, 2});
  const LevelDfa dfa = compile_cnf_to_dfa(f, order);
  CHECK(well_formed(dfa));
  CHECK(testutil::dfa_language(dfa) == testutil::truth_table(f));
}

TEST_CASE("conjoining a clause intersects the language") {
  Rng rng(88);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 5;
    const CnfFormula f = generate_instance(
        GenParams{3, n, static_cast<long>(1 + seed % 8), 1400 + seed});
    const LevelDfa dfa = compile_cnf_to_dfa(f);
    const Clause c = random_clause(1 + static_cast<int>(seed % 3), n, rng);
    const LevelDfa conjoined = conjoin_clause(dfa, c);
    CHECK(well_formed(conjoined));
    CHECK(minimize(conjoined) == conjoined);

    CnfFormula g = f;
    g.clauses.push_back(c);
    CHECK(testutil::dfa_language(conjoined) == testutil::truth_table(g));
  }
}

TEST_CASE("conjoining the empty clause empties the language") {
  const LevelDfa dfa = full_dfa(3);
  CHECK(conjoin_clause(dfa, Clause{{}}).empty_language());
}

TEST_CASE("conjoining can shrink, preserve, or grow the automaton") {
  // One fixed clause, three languages: the state count moves differently
  // against the same clause depending on how much of the language survives.
  const Clause c{{Lit{1, true}, Lit{2, true}, Lit{3, true}}};  // kills 111

  const LevelDfa all_fixed = compile_cnf_to_dfa(prefix_units(3, 3));
  CHECK(dfa_state_count(all_fixed) == 4);
  CHECK(dfa_state_count(conjoin_clause(all_fixed, c)) == 0);  // shrinks

  const LevelDfa two_fixed = compile_cnf_to_dfa(prefix_units(3, 2));
  CHECK(dfa_state_count(two_fixed) == 4);
  CHECK(dfa_state_count(conjoin_clause(two_fixed, c)) == 4);  // stays

  const LevelDfa one_fixed = compile_cnf_to_dfa(prefix_units(3, 1));
  CHECK(dfa_state_count(one_fixed) == 4);
  CHECK(dfa_state_count(conjoin_clause(one_fixed, c)) == 5);  // grows
}

TEST_CASE("minimize merges equivalent states") {
  LevelDfa dfa;
  dfa.n = 2;
  dfa.order = VarOrder(2);
  dfa.levels = {{mk(0, 1)}, {mk(0, -1), mk(0, -1)}, {mk(-1, -1)}};
  const LevelDfa small = minimize(dfa);
  CHECK(dfa_state_count(small) == 3);
  CHECK(well_formed(small));
  CHECK(accepts(small, {0, 0}));
  CHECK(accepts(small, {1, 0}));
  CHECK(!accepts(small, {0, 1}));
}

TEST_CASE("minimize trims states that cannot reach acceptance") {
  LevelDfa dfa;
  dfa.n = 2;
  dfa.order = VarOrder(2);
  // The 0-branch leads to a dead state with no outgoing transitions.
  dfa.levels = {{mk(0, 1)}, {mk(-1, -1), mk(0, 0)}, {mk(-1, -1)}};
  const LevelDfa small = minimize(dfa);
  CHECK(dfa_state_count(small) == 3);
  CHECK(!accepts(small, {0, 0}));
  CHECK(accepts(small, {1, 0}));
  CHECK(accepts(small, {1, 1}));
}

TEST_CASE("minimize is idempotent on random automata") {
  Rng rng(424242);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const LevelDfa dfa = testutil::random_dfa(rng, n, 5);
    CHECK(well_formed(dfa));
    CHECK(minimize(dfa) == dfa);
  }
}

TEST_CASE("accepts validates the word length") {
  const LevelDfa dfa = full_dfa(3);
  CHECK_THROWS_AS(accepts(dfa, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(accepts(dfa, {0, 1, 0, 1}), std::invalid_argument);
}

TEST_CASE("well_formed rejects structural damage") {
  LevelDfa dfa = full_dfa(2);
  dfa.levels[0][0].next[1] = 7;  // dangling target
  CHECK(!well_formed(dfa));

  LevelDfa extra = full_dfa(2);
  extra.levels[1].push_back(mk(0, 0));  // unreachable duplicate
  CHECK(!well_formed(extra));

  LevelDfa dead = full_dfa(2);
  dead.levels[1][0] = mk(-1, -1);  // no path to the accept state
  CHECK(!well_formed(dead));

  LevelDfa wrong_depth = full_dfa(2);
  wrong_depth.levels.pop_back();
  CHECK(!well_formed(wrong_depth));

  LevelDfa wide_start = full_dfa(2);
  wide_start.levels[0].push_back(mk(0, 0));
  CHECK(!well_formed(wide_start));
}

TEST_CASE("transition dump is line-per-edge") {
  std::ostringstream out;
  dump_transitions(full_dfa(2), out);
  CHECK(out.str() == "0 0 0 0\n0 0 1 0\n1 0 0 0\n1 0 1 0\n");
}

TEST_CASE("state cap aborts unrolling") {
  const CnfFormula f = generate_instance(GenParams{3, 12, 20, 9});
  ObddManager mgr(12);
  const auto root = mgr.compile_cnf(f);
  CHECK_THROWS_AS(dfa_from_obdd(mgr, root, /*state_cap=*/4),
                  resource_limit_error);
}

TEST_CASE("dot export names a digraph") {
  std::ostringstream out;
  to_dot(full_dfa(2), out);
  CHECK(out.str().find("digraph") != std::string::npos);
}
