#pragma once

#include <iosfwd>
#include <string_view>

#include "wsn/core_types.hpp"
#include "wsn/metrics.hpp"

namespace wsn {

/// Line-oriented action trace: "time kind node msg_id hop".
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(&out) {}

  void line(SimTime t, std::string_view kind, NodeId node, MsgId msg, int hop);

 private:
  std::ostream* out_;
};

/// Rebuilds run metrics from a trace produced by the engine.
Metrics replay_trace(std::istream& in);

}  // namespace wsn
