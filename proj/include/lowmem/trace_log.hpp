#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

namespace lowmem {

/// One row of a solver trace.
struct TraceRecord {
  std::uint64_t iter = 0;
  double gap = 0.0;
  double infeas_inf = 0.0;  // ||v - b||_inf (0 when the problem has no penalized constraints)
  double obj = 0.0;         // cost component u = <C, X_t>, or the objective for extreme-point runs
  double ms = 0.0;          // wall time since solve start
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct TraceLog {
  std::vector<TraceRecord> records;

  /// CSV with header `iter,gap,infeas_inf,obj,ms`.
  void write_csv(std::ostream& out) const;
};

}  // namespace lowmem
