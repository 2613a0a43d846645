#include "kcl/plots.hpp"

#include <stdexcept>

namespace kcl {

namespace {

std::string py_quote(const std::string& text) {
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '\\' || c == '"') quoted += '\\';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string sweep_preamble(const std::string& csv_path,
                           const std::string& suffix) {
  return "#!/usr/bin/env python3\n"
         "import csv\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "CSV_PATH = " +
         py_quote(csv_path) +
         "\n"
         "OUT_PATH = CSV_PATH + \"." +
         suffix +
         ".png\"\n"
         "\n"
         "with open(CSV_PATH) as fh:\n"
         "    lines = [ln for ln in fh if ln.strip() and not "
         "ln.startswith(\"#\")]\n"
         "rows = list(csv.DictReader(lines))\n"
         "for row in rows:\n"
         "    for key in (\"k\", \"n\", \"m\", \"instances_completed\", "
         "\"blowups\", \"unsat_count\"):\n"
         "        row[key] = int(row[key])\n"
         "    for key in (\"r\", \"mean_nodes\", \"median_nodes\", "
         "\"stddev_nodes\", \"mean_edges\", \"mean_compile_ms\"):\n"
         "        row[key] = float(row[key])\n"
         "\n"
         "fig, ax = plt.subplots(figsize=(7, 5))\n";
}

constexpr const char* kSavePng =
    "ax.legend(fontsize=8)\n"
    "fig.savefig(OUT_PATH, dpi=150, bbox_inches=\"tight\")\n"
    "print(OUT_PATH)\n";

std::string size_vs_r_script(const std::string& csv_path) {
  return sweep_preamble(csv_path, "size_vs_r") +
         "for language, n in sorted({(row[\"language\"], row[\"n\"]) for row "
         "in rows}):\n"
         "    series = sorted((row[\"r\"], row[\"mean_nodes\"]) for row in "
         "rows\n"
         "                    if row[\"language\"] == language and "
         "row[\"n\"] == n)\n"
         "    ax.plot([p[0] for p in series], [p[1] for p in series],\n"
         "            marker=\"o\", label=f\"{language} n={n}\")\n"
         "ax.set_xlabel(\"r = m/n\")\n"
         "ax.set_ylabel(\"mean nodes\")\n" +
         kSavePng;
}

std::string size_vs_n_script(const std::string& csv_path, bool log_x) {
  return sweep_preamble(csv_path,
                        log_x ? "loglog_size_vs_n" : "log_size_vs_n") +
         "for language, r in sorted({(row[\"language\"], row[\"r\"]) for row "
         "in rows}):\n"
         "    series = sorted((row[\"n\"], row[\"mean_nodes\"]) for row in "
         "rows\n"
         "                    if row[\"language\"] == language and "
         "row[\"r\"] == r)\n"
         "    ax.plot([p[0] for p in series], [p[1] for p in series],\n"
         "            marker=\"o\", label=f\"{language} r={r:g}\")\n"
         "ax.set_yscale(\"log\")\n" +
         (log_x ? "ax.set_xscale(\"log\")\n" : "") +
         "ax.set_xlabel(\"n\")\n"
         "ax.set_ylabel(\"mean nodes\")\n" +
         kSavePng;
}

std::string phase_script(const std::string& csv_path) {
  return "#!/usr/bin/env python3\n"
         "import csv\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n"
         "\n"
         "CSV_PATH = " +
         py_quote(csv_path) +
         "\n"
         "OUT_PATH = CSV_PATH + \".phase_fraction_vs_r.png\"\n"
         "\n"
         "with open(CSV_PATH) as fh:\n"
         "    lines = [ln for ln in fh if ln.strip() and not "
         "ln.startswith(\"#\")]\n"
         "rows = list(csv.DictReader(lines))\n"
         "rows.sort(key=lambda row: float(row[\"r\"]))\n"
         "rs = [float(row[\"r\"]) for row in rows]\n"
         "fractions = [float(row[\"fraction\"]) for row in rows]\n"
         "states = [float(row[\"mean_dfa_states\"]) for row in rows]\n"
         "\n"
         "fig, ax = plt.subplots(figsize=(7, 5))\n"
         "ax.plot(rs, fractions, marker=\"o\", color=\"tab:blue\",\n"
         "        label=\"fraction with multi-interchangeable probes\")\n"
         "ax.set_xlabel(\"r = m/n\")\n"
         "ax.set_ylabel(\"fraction\")\n"
         "ax.set_ylim(-0.05, 1.05)\n"
         "twin = ax.twinx()\n"
         "twin.plot(rs, states, marker=\"s\", color=\"tab:red\",\n"
         "          label=\"mean DFA states\")\n"
         "twin.set_ylabel(\"mean DFA states\")\n"
         "handles_a, labels_a = ax.get_legend_handles_labels()\n"
         "handles_b, labels_b = twin.get_legend_handles_labels()\n"
         "ax.legend(handles_a + handles_b, labels_a + labels_b, "
         "fontsize=8)\n"
         "fig.savefig(OUT_PATH, dpi=150, bbox_inches=\"tight\")\n"
         "print(OUT_PATH)\n";
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "size-vs-r") return PlotKind::SizeVsR;
  if (name == "log-size-vs-n") return PlotKind::LogSizeVsN;
  if (name == "loglog-size-vs-n") return PlotKind::LogLogSizeVsN;
  if (name == "phase-fraction-vs-r") return PlotKind::PhaseFractionVsR;
  throw std::invalid_argument("unknown plot kind: " + name);
}

std::string to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::SizeVsR:
      return "size-vs-r";
    case PlotKind::LogSizeVsN:
      return "log-size-vs-n";
    case PlotKind::LogLogSizeVsN:
      return "loglog-size-vs-n";
    case PlotKind::PhaseFractionVsR:
      return "phase-fraction-vs-r";
  }
  throw std::invalid_argument("unknown plot kind");
}

std::string emit_plot_script(PlotKind kind, const std::vector<SweepRow>& rows,
                             const std::string& csv_path) {
  if (rows.empty()) throw std::invalid_argument("no rows to plot");
  switch (kind) {
    case PlotKind::SizeVsR:
      return size_vs_r_script(csv_path);
    case PlotKind::LogSizeVsN:
      return size_vs_n_script(csv_path, false);
    case PlotKind::LogLogSizeVsN:
      return size_vs_n_script(csv_path, true);
    case PlotKind::PhaseFractionVsR:
      throw std::invalid_argument(
          "phase-fraction-vs-r needs a phase CSV, not a sweep CSV");
  }
  throw std::invalid_argument("unknown plot kind");
}

std::string emit_plot_script(PlotKind kind, const std::vector<PhaseRow>& rows,
                             const std::string& csv_path) {
  if (rows.empty()) throw std::invalid_argument("no rows to plot");
  if (kind != PlotKind::PhaseFractionVsR)
    throw std::invalid_argument(to_string(kind) +
                                " needs a sweep CSV, not a phase CSV");
  return phase_script(csv_path);
}

}  // namespace kcl
