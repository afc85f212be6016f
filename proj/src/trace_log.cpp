#include "lowmem/trace_log.hpp"

#include <cstdio>

namespace lowmem {

void TraceLog::write_csv(std::ostream& out) const {
  out << "iter,gap,infeas_inf,obj,ms\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g,%.3f\n",
                  static_cast<unsigned long long>(r.iter), r.gap, r.infeas_inf, r.obj, r.ms);
    out << buf;
  }
}

}  // namespace lowmem
