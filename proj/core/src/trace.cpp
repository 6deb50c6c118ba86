#include "dpcp/trace.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "dpcp/dataset.hpp"
#include "dpcp/error.hpp"

namespace dpcp {

void write_trace_csv(std::ostream& out, const std::vector<Trace>& traces) {
  out << "instance,iteration,objective,step,angle,backtracks,forced,note\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (const TraceEntry& e : traces[i]) {
      out << i << ',' << e.iteration << ',' << format_double(e.objective) << ',' << format_double(e.step) << ',';
      if (!std::isnan(e.angle)) out << format_double(e.angle);
      out << ',' << e.backtracks << ',' << (e.forced ? 1 : 0) << ',' << e.note << '\n';
    }
  }
}

void save_trace_csv(const std::vector<Trace>& traces, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_trace_csv(out, traces);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace dpcp
