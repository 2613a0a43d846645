#pragma once

#include <string>
#include <vector>

#include "kcl/pathstruct.hpp"
#include "kcl/sweep.hpp"

namespace kcl {

enum class PlotKind { SizeVsR, LogSizeVsN, LogLogSizeVsN, PhaseFractionVsR };

// Accepts size-vs-r, log-size-vs-n, loglog-size-vs-n, phase-fraction-vs-r.
PlotKind plot_kind_from_string(const std::string& name);
std::string to_string(PlotKind kind);

// Emits a self-contained python3/matplotlib script that re-reads the CSV at
// run time and writes a PNG next to it.  The rows only validate the request
// (nonempty, right CSV flavor for the kind).
std::string emit_plot_script(PlotKind kind, const std::vector<SweepRow>& rows,
                             const std::string& csv_path);
std::string emit_plot_script(PlotKind kind, const std::vector<PhaseRow>& rows,
                             const std::string& csv_path);

}  // namespace kcl
