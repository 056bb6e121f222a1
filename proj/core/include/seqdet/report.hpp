#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seqdet/asymptotics.hpp"

namespace seqdet {

/// Shortest round-trippable decimal form of a double; keeps repeated runs
/// byte-identical.
std::string format_double(double value);

struct CalibrationRow {
  double alpha;
  Procedure procedure;
  double threshold;
};

/// `alpha,procedure,threshold` rows under a versioned header comment.
std::string thresholds_csv(const std::vector<CalibrationRow>& rows);

/// The fixed 13-column study/simulate schema; a rho(alpha) schedule appends
/// a trailing mu column (versioned in the header comment).
std::string study_csv(const StudyReport& report);

/// Shiryaev-vs-SR delay comparison per (alpha, m); only meaningful when the
/// report carries both procedures.
std::string comparison_csv(const StudyReport& report);

/// Gnuplot-style two-column (|log alpha|, delay) series, one file per
/// (procedure, m) pair. Returns {file name, contents}.
std::vector<std::pair<std::string, std::string>> study_series_files(
    const StudyReport& report);

}  // namespace seqdet
