#include "wsn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "wsn/engine.hpp"

namespace wsn {

namespace {

template <typename T>
std::vector<T> axis(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return {fallback};
  const auto& v = j.at(key);
  if (!v.is_array()) return {v.get<T>()};
  return v.get<std::vector<T>>();
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SweepGrid parse_grid(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grid must be a JSON object");
  static const char* known[] = {"protocols", "nodes", "lambda",    "alpha",
                                "beta",      "seeds", "replicates", "master_seed", "base"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("grid: unknown key \"" + key + "\"");
    }
  }
  SweepGrid g;
  g.source = j;
  try {
    if (j.contains("base")) g.base = apply_overrides(g.base, j.at("base"));
    for (const auto& name : axis<std::string>(j, "protocols", std::string(to_string(g.base.protocol)))) {
      auto p = parse_protocol(name);
      if (!p) throw ConfigError("grid: unknown protocol \"" + name + "\"");
      g.protocols.push_back(*p);
    }
    g.nodes = axis<std::size_t>(j, "nodes", g.base.nodes);
    g.lambda = axis<double>(j, "lambda", g.base.lambda);
    g.alpha = axis<double>(j, "alpha", g.base.alpha);
    g.beta = axis<double>(j, "beta", g.base.beta);
    g.master_seed = j.value("master_seed", g.base.seed);
    if (j.contains("seeds")) {
      g.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      const auto reps = j.value<std::size_t>("replicates", 10);
      for (std::size_t i = 0; i < reps; ++i) g.seeds.push_back(g.master_seed + i);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid: bad value: ") + e.what());
  }
  return g;
}

SweepGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("grid file " + path + " is not valid JSON: " + e.what());
  }
  return parse_grid(j);
}

std::vector<SimConfig> expand(const SweepGrid& g) {
  std::vector<SimConfig> cells;
  for (auto n : g.nodes)
    for (auto l : g.lambda)
      for (auto a : g.alpha)
        for (auto b : g.beta)
          for (auto p : g.protocols)
            for (auto s : g.seeds) {
              SimConfig c = g.base;
              c.nodes = n;
              c.lambda = l;
              c.alpha = a;
              c.beta = b;
              c.protocol = p;
              c.seed = s;
              cells.push_back(c);
            }
  return cells;
}

SweepRow run_cell(const SimConfig& cfg) {
  SweepRow row;
  row.cfg = cfg;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    row.metrics = run_simulation(cfg);
    row.ok = true;
  } catch (const ConfigError& e) {
    row.error = e.what();
  }
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::string csv_header() {
  return "protocol,N,lambda,alpha,beta,seed,data_sent,data_delivered,success_rate,avg_delay_s,"
         "drops,tx_count,fallbacks,wall_time_s";
}

std::string csv_row(const SweepRow& row) {
  const SimConfig& c = row.cfg;
  std::string cell = std::string(to_string(c.protocol)) + "," + std::to_string(c.nodes) + "," +
                     fmt(c.lambda) + "," + fmt(c.alpha) + "," + fmt(c.beta) + "," +
                     std::to_string(c.seed);
  if (!row.ok) return "# error " + cell + ": " + row.error;
  const Metrics& m = row.metrics;
  const double sr = m.data_sent ? success_rate(m) : std::nan("");
  return cell + "," + std::to_string(m.data_sent) + "," + std::to_string(m.data_delivered) + "," +
         fmt(sr) + "," + fmt(m.avg_delay()) + "," + std::to_string(m.drops) + "," +
         std::to_string(m.tx_count) + "," + std::to_string(m.fallback_count) + "," +
         fmt(row.wall_time_s);
}

void run_sweep(const SweepGrid& grid, std::ostream& out, unsigned threads) {
  const auto cells = expand(grid);
  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) rows[i] = run_cell(cells[i]);
  };
  threads = std::max(1U, threads);
  if (threads == 1 || cells.size() < 2) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  out << "# " << kToolVersion << "\n";
  out << "# master_seed " << grid.master_seed << "\n";
  out << "# config_digest " << digest(grid.source) << "\n";
  out << csv_header() << "\n";
  for (const auto& r : rows) out << csv_row(r) << "\n";
}

}  // namespace wsn
