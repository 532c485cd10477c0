#include "wsn/config.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace wsn {

std::string to_string(Deployment d) { return d == Deployment::Square ? "square" : "disk"; }

double SimConfig::deployment_area() const {
  return deployment == Deployment::Square ? area * area : std::numbers::pi * area * area;
}

double SimConfig::effective_d_initial() const {
  if (d_initial) return *d_initial;
  // Expected neighbours N r^2 / R^2 with R the radius of the equal-area disk.
  const double r_eq_sq = deployment_area() / std::numbers::pi;
  return static_cast<double>(nodes) * range_m * range_m / r_eq_sq;
}

MacParams SimConfig::mac_params() const {
  MacParams p;
  p.t_min = t_min;
  p.airtime = effective_airtime();
  p.ttl = effective_ttl();
  p.hop_capacity = hop_table_capacity;
  p.hop_timer = hop_timer;
  p.rebeacon_interval = effective_rebeacon();
  return p;
}

AdaptiveWindowState SimConfig::initial_window() const {
  AdaptiveWindowState s;
  s.t_min = t_min;
  s.t_max = t_max_initial;
  s.t_cap = effective_t_cap();
  s.d_prev = effective_d_initial();
  s.i_prev = effective_i_initial();
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (nodes == 0) fail("nodes: need at least one node (the sink)");
  if (!(area > 0.0)) fail("area: must be positive");
  if (!(range_m > 0.0)) fail("range_m: must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda: must be a finite rate >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha: must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) fail("beta: must lie in [0, 1]");
  if (!(t_min > 0.0)) fail("t_min: must be positive");
  if (!(t_min < t_max_initial)) fail("t_max_initial: must exceed t_min");
  if (!(effective_t_cap() >= t_max_initial)) fail("t_cap: must be at least t_max_initial");
  const Duration air = effective_airtime();
  if (!(air > 0.0 && air < t_min)) fail("airtime: must lie in (0, t_min)");
  if (!(effective_ttl() > 0.0)) fail("ttl: must be positive");
  if (!(t_inactive > 0.0)) fail("t_inactive: must be positive");
  if (hop_table_capacity == 0) fail("hop_table_capacity: must be positive");
  if (!(hop_timer > 0.0)) fail("hop_timer: must be positive");
  if (!(effective_rebeacon() >= 0.0)) fail("rebeacon_interval: must be >= 0");
  if (d_initial && !(*d_initial >= 0.0)) fail("d_initial: must be >= 0");
  if (i_initial && !(*i_initial >= 0.0)) fail("i_initial: must be >= 0");
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j;
  j["protocol"] = std::string(to_string(c.protocol));
  j["nodes"] = c.nodes;
  j["deployment"] = to_string(c.deployment);
  j["area"] = c.area;
  j["range_m"] = c.range_m;
  j["lambda"] = c.lambda;
  j["total_events"] = c.total_events;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["t_min"] = c.t_min;
  j["t_max_initial"] = c.t_max_initial;
  j["t_cap"] = c.effective_t_cap();
  j["airtime"] = c.effective_airtime();
  j["ttl"] = c.effective_ttl();
  j["d_initial"] = c.effective_d_initial();
  j["i_initial"] = c.effective_i_initial();
  j["t_inactive"] = c.t_inactive;
  j["hop_table_capacity"] = c.hop_table_capacity;
  j["hop_timer"] = c.hop_timer;
  j["rebeacon_interval"] = c.effective_rebeacon();
  j["seed"] = c.seed;
  return j;
}

SimConfig apply_overrides(SimConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config overrides must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "protocol") {
        auto p = parse_protocol(v.get<std::string>());
        if (!p) throw ConfigError("protocol: unknown value " + v.dump());
        c.protocol = *p;
      } else if (key == "nodes") {
        c.nodes = v.get<std::size_t>();
      } else if (key == "deployment") {
        const auto s = v.get<std::string>();
        if (s == "square") {
          c.deployment = Deployment::Square;
        } else if (s == "disk") {
          c.deployment = Deployment::Disk;
        } else {
          throw ConfigError("deployment: expected square or disk");
        }
      } else if (key == "area") {
        c.area = v.get<double>();
      } else if (key == "range_m") {
        c.range_m = v.get<double>();
      } else if (key == "lambda") {
        c.lambda = v.get<double>();
      } else if (key == "total_events") {
        c.total_events = v.get<std::size_t>();
      } else if (key == "alpha") {
        c.alpha = v.get<double>();
      } else if (key == "beta") {
        c.beta = v.get<double>();
      } else if (key == "t_min") {
        c.t_min = v.get<double>();
      } else if (key == "t_max_initial") {
        c.t_max_initial = v.get<double>();
      } else if (key == "t_cap") {
        c.t_cap = v.get<double>();
      } else if (key == "airtime") {
        c.airtime = v.get<double>();
      } else if (key == "ttl") {
        c.ttl = v.get<double>();
      } else if (key == "d_initial") {
        c.d_initial = v.get<double>();
      } else if (key == "i_initial") {
        c.i_initial = v.get<double>();
      } else if (key == "t_inactive") {
        c.t_inactive = v.get<double>();
      } else if (key == "hop_table_capacity") {
        c.hop_table_capacity = v.get<std::size_t>();
      } else if (key == "hop_timer") {
        c.hop_timer = v.get<double>();
      } else if (key == "rebeacon_interval") {
        c.rebeacon_interval = v.get<double>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else {
        throw ConfigError("unknown config key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  return c;
}

std::string digest(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wsn
