#include "wsn/trace.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace wsn {

void TraceWriter::line(SimTime t, std::string_view kind, NodeId node, MsgId msg, int hop) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  *out_ << buf << ' ' << kind << ' ' << node << ' ' << msg << ' ' << hop << '\n';
}

Metrics replay_trace(std::istream& in) {
  Metrics m;
  std::map<MsgId, SimTime> created;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    SimTime t;
    std::string kind;
    long long node, msg, hop;
    if (!(ls >> t >> kind >> node >> msg >> hop)) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + " is malformed");
    }
    if (kind == "sense") {
      ++m.data_sent;
      created[msg] = t;
    } else if (kind == "deliver") {
      ++m.data_delivered;
      auto it = created.find(msg);
      if (it == created.end()) {
        throw std::runtime_error("trace delivers msg " + std::to_string(msg) + " before sensing it");
      }
      m.delays.push_back(t - it->second);
    } else if (kind == "tx_beacon") {
      ++m.tx_count;
      ++m.beacon_tx;
    } else if (kind == "tx_control") {
      ++m.tx_count;
      ++m.control_tx;
    } else if (kind == "tx_data") {
      ++m.tx_count;
      ++m.data_tx;
    } else if (kind == "drop_collision") {
      ++m.drops;
      ++m.collision_drops;
    } else if (kind == "drop_gate") {
      ++m.drops;
      ++m.gate_drops;
    } else if (kind == "drop_ttl") {
      ++m.drops;
      ++m.ttl_drops;
    } else if (kind == "fallback") {
      ++m.fallback_count;
    }
  }
  return m;
}

}  // namespace wsn
