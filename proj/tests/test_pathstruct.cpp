#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "kcl/cnf.hpp"
#include "kcl/dfa.hpp"
#include "kcl/pathstruct.hpp"
#include "kcl/rng.hpp"
#include "test_util.hpp"

using namespace kcl;

namespace {

// Truth-table restatement of full interchangeability: a variable is free in
// the model set when flipping it never changes membership.
bool fully_multi_by_table(const CnfFormula& f) {
  const std::vector<bool> member = testutil::truth_table(f);
  int free_vars = 0;
  for (int v = 1; v <= f.num_vars; ++v) {
    const std::uint64_t bit = 1ull << (v - 1);
    bool free_var = true;
    for (std::uint64_t a = 0; a < member.size(); ++a)
      if ((a & bit) == 0 && member[a] != member[a | bit]) free_var = false;
    if (free_var) ++free_vars;
  }
  return free_vars >= 2;
}

bool weak_multi_by_table(const CnfFormula& f, const PartialAssignment& pa) {
  if (static_cast<int>(pa.size()) > f.num_vars - 2) return false;
  const std::vector<bool> member = testutil::truth_table(f);
  for (std::uint64_t a = 0; a < member.size(); ++a) {
    bool extends = true;
    for (const auto& [var, value] : pa.pairs())
      if ((((a >> (var - 1)) & 1) != 0) != value) extends = false;
    if (extends && !member[a]) return false;
  }
  return true;
}

std::vector<std::uint8_t> path_of(std::initializer_list<int> bits) {
  std::vector<std::uint8_t> p;
  for (int b : bits) p.push_back(static_cast<std::uint8_t>(b));
  return p;
}

}  // namespace

TEST_CASE("every edge of the full automaton has an adjoint twin") {
  const LevelDfa dfa = full_dfa(3);
  const auto edges = adjoint_edges(dfa, path_of({1, 0, 1}));
  REQUIRE(edges.size() == 3);
  CHECK(edges[0] == DfaEdge{0, 0, 0, 0});
  CHECK(edges[1] == DfaEdge{1, 0, 1, 0});
  CHECK(edges[2] == DfaEdge{2, 0, 0, 0});
}

TEST_CASE("forced paths have no adjoints") {
  const CnfFormula all_units{
      3,
      {Clause{{Lit{1, false}}}, Clause{{Lit{2, false}}}, Clause{{Lit{3, false}}}}};
  const LevelDfa dfa = compile_cnf_to_dfa(all_units);
  CHECK(adjoint_edges(dfa, path_of({1, 1, 1})).empty());
}

TEST_CASE("adjoints appear exactly at parallel transitions") {
  // x1 over two variables: the first step is forced, the second is free.
  const CnfFormula f{2, {Clause{{Lit{1, false}}}}};
  const LevelDfa dfa = compile_cnf_to_dfa(f);
  const auto edges = adjoint_edges(dfa, path_of({1, 0}));
  REQUIRE(edges.size() == 1);
  CHECK(edges[0] == DfaEdge{1, 0, 1, 0});
}

TEST_CASE("adjoint_edges rejects bad paths") {
  const CnfFormula f{2, {Clause{{Lit{1, false}}}}};
  const LevelDfa dfa = compile_cnf_to_dfa(f);
  CHECK_THROWS_AS(adjoint_edges(dfa, path_of({0, 0})), std::invalid_argument);
  CHECK_THROWS_AS(adjoint_edges(dfa, path_of({1})), std::invalid_argument);

  const CnfFormula unsat{2, {Clause{{Lit{1, false}}}, Clause{{Lit{1, true}}}}};
  const LevelDfa empty = compile_cnf_to_dfa(unsat);
  CHECK_THROWS_AS(adjoint_edges(empty, path_of({0, 0})),
                  std::invalid_argument);
}

TEST_CASE("classification counts adjoints at nogood levels only") {
  const LevelDfa dfa = full_dfa(4);
  const Clause c{{Lit{1, true}, Lit{2, true}}};  // nogood: x1=1, x2=1
  CHECK(classify_path(dfa, path_of({1, 1, 0, 0}), c).i == 2);
  CHECK_THROWS_AS(classify_path(dfa, path_of({1, 0, 0, 0}), c),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify_path(dfa, path_of({1, 1, 0}), c),
                  std::invalid_argument);

  // Forced language {111}: the compatible path exists but has no adjoints.
  const CnfFormula all_units{
      3,
      {Clause{{Lit{1, false}}}, Clause{{Lit{2, false}}}, Clause{{Lit{3, false}}}}};
  const LevelDfa forced = compile_cnf_to_dfa(all_units);
  const Clause c2{{Lit{1, true}, Lit{2, true}}};
  CHECK(classify_path(forced, path_of({1, 1, 1}), c2).i == 0);
}

TEST_CASE("multi-interchangeable path detection on witnesses") {
  const Clause wide{{Lit{1, true}, Lit{2, true}}};
  CHECK(has_multi_interchangeable_path(full_dfa(3), wide));

  const CnfFormula unsat{3, {Clause{{Lit{1, false}}}, Clause{{Lit{1, true}}}}};
  CHECK(!has_multi_interchangeable_path(compile_cnf_to_dfa(unsat), wide));

  // A unit clause owns a single nogood level, so i never reaches 2.
  const Clause unit{{Lit{1, true}}};
  CHECK(!has_multi_interchangeable_path(full_dfa(3), unit));

  const CnfFormula all_units{
      3,
      {Clause{{Lit{1, false}}}, Clause{{Lit{2, false}}}, Clause{{Lit{3, false}}}}};
  CHECK(!has_multi_interchangeable_path(compile_cnf_to_dfa(all_units), wide));
}

TEST_CASE("path detection agrees with exhaustive enumeration") {
  Rng rng(777);
  int positives = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(5));
    const CnfFormula f = generate_instance(
        GenParams{2, n, static_cast<long>(1 + rng.below(8)),
                  derive_seed(9100, {static_cast<std::uint64_t>(trial)})});
    const LevelDfa dfa = compile_cnf_to_dfa(f);
    const Clause c = random_clause(1 + static_cast<int>(rng.below(3)), n, rng);
    const bool fast = has_multi_interchangeable_path(dfa, c);
    CHECK(fast == testutil::multi_path_by_enumeration(dfa, c));
    if (fast) ++positives;
  }
  CHECK(positives > 5);  // the sample must exercise both outcomes
  CHECK(positives < 60);
}

TEST_CASE("full interchangeability needs two free variables") {
  // x3 and x4 are untouched by the clause set.
  const CnfFormula two_free{4, {Clause{{Lit{1, false}, Lit{2, false}}}}};
  CHECK(fully_multi_interchangeable(two_free));

  const CnfFormula no_free{
      2, {Clause{{Lit{1, false}}}, Clause{{Lit{2, false}}}}};
  CHECK(!fully_multi_interchangeable(no_free));

  const CnfFormula one_free{2, {Clause{{Lit{1, false}}}}};
  CHECK(!fully_multi_interchangeable(one_free));

  // Vacuously true on an empty model set: no flip ever changes membership.
  const CnfFormula unsat{
      3, {Clause{{Lit{1, false}}}, Clause{{Lit{1, true}}}}};
  CHECK(fully_multi_interchangeable(unsat));

  CHECK_THROWS_AS(fully_multi_interchangeable(CnfFormula{30, {}}),
                  std::invalid_argument);

  Rng rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(4));
    const CnfFormula f = generate_instance(
        GenParams{2, n, static_cast<long>(rng.below(6)),
                  derive_seed(9200, {static_cast<std::uint64_t>(trial)})});
    CHECK(fully_multi_interchangeable(f) == fully_multi_by_table(f));
  }
}

TEST_CASE("weak interchangeability under a partial assignment") {
  PartialAssignment empty_pa;
  CHECK(weak_multi_interchangeable(CnfFormula{3, {}}, empty_pa));

  PartialAssignment too_full;
  too_full.set(1, true);
  too_full.set(2, false);
  CHECK(!weak_multi_interchangeable(CnfFormula{3, {}}, too_full));

  const CnfFormula f{3, {Clause{{Lit{1, false}, Lit{2, false}}}}};
  PartialAssignment x1_true;
  x1_true.set(1, true);
  CHECK(weak_multi_interchangeable(f, x1_true));
  PartialAssignment x1_false;
  x1_false.set(1, false);
  CHECK(!weak_multi_interchangeable(f, x1_false));

  PartialAssignment out_of_range;
  out_of_range.set(9, true);
  CHECK_THROWS_AS(weak_multi_interchangeable(f, out_of_range),
                  std::invalid_argument);

  Rng rng(5150);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(3));
    const CnfFormula g = generate_instance(
        GenParams{2, n, static_cast<long>(rng.below(5)),
                  derive_seed(9300, {static_cast<std::uint64_t>(trial)})});
    PartialAssignment pa;
    for (int v = 1; v <= n; ++v)
      if (rng.below(3) == 0) pa.set(v, rng.bit());
    CHECK(weak_multi_interchangeable(g, pa) == weak_multi_by_table(g, pa));
  }
}

TEST_CASE("adjoint bundles certify weak interchangeability") {
  // Fixing the path bits outside an adjoint set leaves a block of full
  // freedom: all completions stay inside the language.
  Rng rng(6021);
  int exercised = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(3));
    const CnfFormula f = generate_instance(
        GenParams{2, n, static_cast<long>(1 + rng.below(5)),
                  derive_seed(9400, {static_cast<std::uint64_t>(trial)})});
    const LevelDfa dfa = compile_cnf_to_dfa(f);
    if (dfa.empty_language()) continue;
    const std::vector<bool> member = testutil::truth_table(f);
    for (std::uint64_t a = 0; a < member.size(); ++a) {
      if (!member[a]) continue;
      std::vector<std::uint8_t> path(n);
      for (int level = 0; level < n; ++level)
        path[level] = static_cast<std::uint8_t>(
            (a >> (dfa.order.var_at(level) - 1)) & 1);
      const auto edges = adjoint_edges(dfa, path);
      if (edges.size() < 2) continue;
      std::vector<bool> is_adjoint(n, false);
      for (const DfaEdge& e : edges) is_adjoint[e.level] = true;
      PartialAssignment pa;
      for (int level = 0; level < n; ++level)
        if (!is_adjoint[level]) pa.set(dfa.order.var_at(level), path[level] != 0);
      CHECK(weak_multi_interchangeable(f, pa));
      ++exercised;
    }
  }
  CHECK(exercised > 20);
}

TEST_CASE("phase experiment is deterministic and parallel-stable") {
  PhaseExperimentConfig cfg;
  cfg.k = 3;
  cfg.n = 8;
  cfg.r_start = 0.5;
  cfg.r_stop = 1.5;
  cfg.r_step = 0.5;
  cfg.instances_per_r = 6;
  cfg.probe_clauses = 10;
  cfg.threshold = 5;
  cfg.seed = 7;
  const auto rows = phase_experiment(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows == phase_experiment(cfg));
  PhaseExperimentConfig threaded = cfg;
  threaded.jobs = 3;
  CHECK(rows == phase_experiment(threaded));
  for (const PhaseRow& row : rows) CHECK(row.instances == 6);
}

TEST_CASE("empty instances sit on the easy-hard side") {
  PhaseExperimentConfig cfg;
  cfg.k = 3;
  cfg.n = 6;
  cfg.r_start = 0.0;
  cfg.r_stop = 0.0;
  cfg.r_step = 0.2;
  cfg.instances_per_r = 4;
  cfg.probe_clauses = 20;
  cfg.threshold = 10;
  cfg.seed = 11;
  const auto rows = phase_experiment(cfg);
  REQUIRE(rows.size() == 1);
  // m = 0 compiles to the full automaton, where every probe clause finds a
  // multi-interchangeable path.
  CHECK(rows[0].fraction == 1.0);
  CHECK(rows[0].mean_dfa_states == 7.0);
}

TEST_CASE("saturated instances sit on the hard-easy side") {
  PhaseExperimentConfig cfg;
  cfg.k = 3;
  cfg.n = 6;
  cfg.r_start = 8.0;
  cfg.r_stop = 8.0;
  cfg.r_step = 0.2;
  cfg.instances_per_r = 4;
  cfg.probe_clauses = 20;
  cfg.threshold = 10;
  cfg.seed = 13;
  const auto rows = phase_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].fraction == 0.0);
}

TEST_CASE("phase blowups are tracked apart from labeled instances") {
  PhaseExperimentConfig cfg;
  cfg.k = 3;
  cfg.n = 14;
  cfg.r_start = 2.0;
  cfg.r_stop = 2.0;
  cfg.r_step = 0.2;
  cfg.instances_per_r = 3;
  cfg.probe_clauses = 4;
  cfg.threshold = 2;
  cfg.seed = 17;
  cfg.node_cap = 8;
  const auto rows = phase_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].blowups == 3);
  CHECK(rows[0].instances == 0);
  CHECK(rows[0].fraction == 0.0);
}

TEST_CASE("phase experiment validates its configuration") {
  PhaseExperimentConfig bad;
  bad.k = 5;
  bad.n = 3;
  CHECK_THROWS_AS(phase_experiment(bad), std::invalid_argument);

  PhaseExperimentConfig threshold;
  threshold.threshold = 200;
  CHECK_THROWS_AS(phase_experiment(threshold), std::invalid_argument);

  PhaseExperimentConfig grid;
  grid.r_step = -0.1;
  CHECK_THROWS_AS(phase_experiment(grid), std::invalid_argument);

  PhaseExperimentConfig instances;
  instances.instances_per_r = 0;
  CHECK_THROWS_AS(phase_experiment(instances), std::invalid_argument);
}

TEST_CASE("phase CSV round-trips") {
  PhaseExperimentConfig cfg;
  cfg.k = 3;
  cfg.n = 7;
  cfg.r_start = 0.5;
  cfg.r_stop = 2.5;
  cfg.r_step = 1.0;
  cfg.instances_per_r = 5;
  cfg.probe_clauses = 8;
  cfg.threshold = 4;
  cfg.seed = 23;
  const auto rows = phase_experiment(cfg);
  std::ostringstream out;
  emit_phase_csv(rows, out);
  CHECK(out.str().rfind("# phase-csv-v1\n", 0) == 0);
  std::istringstream in(out.str());
  const auto parsed = parse_phase_csv(in);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed[i].r == doctest::Approx(rows[i].r));
    CHECK(parsed[i].instances == rows[i].instances);
    CHECK(parsed[i].easy_hard_count == rows[i].easy_hard_count);
    CHECK(parsed[i].fraction == doctest::Approx(rows[i].fraction));
    CHECK(parsed[i].mean_dfa_states == doctest::Approx(rows[i].mean_dfa_states));
  }

  std::istringstream missing_header("r,instances\n1,2\n");
  CHECK_THROWS_AS(parse_phase_csv(missing_header), parse_error);
  std::istringstream short_row("# phase-csv-v1\n" +
                               std::string("r,instances,easy_hard_count,"
                                           "fraction,mean_dfa_states\n1,2\n"));
  try {
    parse_phase_csv(short_row);
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 3);
  }
}
