#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace dpcp {

/// One recorded iterate of an iterative method.
struct TraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double step = 0.0;
  /// Principal angle from the true complement when it is known, NaN otherwise.
  double angle = std::numeric_limits<double>::quiet_NaN();
  int backtracks = 0;
  /// Set when a line search exhausted its backtracks and took the smallest step.
  bool forced = false;
  std::string note;
};

using Trace = std::vector<TraceEntry>;

/// CSV with columns instance,iteration,objective,step,angle,backtracks,forced,note.
/// Unknown angles are written as empty cells.
void write_trace_csv(std::ostream& out, const std::vector<Trace>& traces);
void save_trace_csv(const std::vector<Trace>& traces, const std::filesystem::path& path);

}  // namespace dpcp
