#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "kcl/cnf.hpp"
#include "kcl/common.hpp"

namespace kcl {

enum class Language { Obdd, Dfa, Dnnf };

std::string to_string(Language language);
// Accepts the CSV spellings (OBDD/DFA/DNNF) case-insensitively.
Language language_from_string(const std::string& name);

// Inclusive arithmetic grid start, start+step, ..., stop.
struct RGrid {
  double start = 0.2;
  double stop = 4.2;
  double step = 0.2;

  int points() const;
  double at(int i) const { return start + i * step; }
};

// Per-k satisfiability-threshold ratios used to bound r-grids.  The k=3
// entry is the classic 4.3; the others are conventional literature values.
// They cap experiment ranges and carry no correctness weight.
class ThresholdTable {
 public:
  ThresholdTable();

  double r_p(int k) const;  // throws std::invalid_argument on unknown k
  void set(int k, double value) { r_p_by_k_[k] = value; }

 private:
  std::map<int, double> r_p_by_k_;
};

struct SweepConfig {
  int k = 3;
  std::vector<int> ns;
  RGrid grid;
  int instances_per_point = 200;
  std::vector<Language> languages = {Language::Obdd, Language::Dfa,
                                     Language::Dnnf};
  std::uint64_t seed = 0;
  std::uint64_t node_cap = 5'000'000;
  std::uint64_t time_cap_ms = 0;  // per instance; 0 = unlimited
  int jobs = 1;
};

// One (k, n, r, language) cell of the size-estimation protocol: sample mean
// and spread of compiled sizes over the completed instances.  Blowups stay
// out of the statistics and are reported on the side.
struct SweepRow {
  int k = 0;
  int n = 0;
  double r = 0;
  long m = 0;
  Language language = Language::Obdd;
  int instances_completed = 0;
  int blowups = 0;
  int unsat_count = 0;
  double mean_nodes = 0;
  double median_nodes = 0;
  double stddev_nodes = 0;
  double mean_edges = 0;
  double mean_compile_ms = 0;
};

// Compiles every derived-seed instance under every requested language.  The
// instance set for a given (k, n, r) is shared across languages, so curves
// are paired.  Deterministic given (config, seed) up to compile timings.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

void emit_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> parse_sweep_csv(std::istream& in);

struct PeakResult {
  bool found = false;   // false when the smoothed argmax sits on an endpoint
  double r_raw = 0;     // argmax of the raw means
  double r_smoothed = 0;
};

// Peak location of mean_nodes over r for rows of one (k, n, language)
// series, after 3-point moving-average smoothing; needs >= 5 grid points.
PeakResult detect_peak(const std::vector<SweepRow>& rows);

struct GrowthFit {
  double semilog_slope = 0;  // least squares of ln(nodes) on n
  double semilog_r2 = 0;
  double loglog_slope = 0;   // least squares of ln(nodes) on ln(n)
  double loglog_r2 = 0;
};

// Growth-regime fit over (n, mean_nodes) samples of one (k, r, language)
// series; needs >= 4 distinct n with positive means.
GrowthFit fit_growth(const std::vector<std::pair<int, double>>& points);

}  // namespace kcl
