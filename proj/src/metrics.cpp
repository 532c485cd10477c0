#include "wsn/metrics.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace wsn {

double Metrics::avg_delay() const {
  if (delays.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());
}

double success_rate(const Metrics& m) {
  if (m.data_sent == 0) throw std::domain_error("success rate undefined: no data was sent");
  return 100.0 * static_cast<double>(m.data_delivered) / static_cast<double>(m.data_sent);
}

}  // namespace wsn
