// wsnsim: command-line front end for the simulator and analysis toolkit.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsn/analysis.hpp"
#include "wsn/config.hpp"
#include "wsn/engine.hpp"
#include "wsn/sweep.hpp"
#include "wsn/trace.hpp"

using namespace wsn;

namespace {

int cmd_simulate(SimConfig cfg, const std::string& protocol, const std::string& deployment,
                 const std::string& config_file, const std::string& trace_path, bool stats) {
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) throw ConfigError("cannot open config file " + config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    cfg = apply_overrides(cfg, j);
  }
  if (!protocol.empty()) {
    auto p = parse_protocol(protocol);
    if (!p) throw ConfigError("unknown protocol " + protocol);
    cfg.protocol = *p;
  }
  if (!deployment.empty()) cfg = apply_overrides(cfg, {{"deployment", deployment}});
  cfg.validate();

  std::ofstream trace_file;
  std::unique_ptr<TraceWriter> trace;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) {
      std::cerr << "error: cannot write trace to " << trace_path << "\n";
      return 1;
    }
    trace = std::make_unique<TraceWriter>(trace_file);
  }
  SweepRow row;
  row.cfg = cfg;
  const auto t0 = std::chrono::steady_clock::now();
  RunStats rs;
  row.metrics = run_simulation(cfg, trace.get(), &rs);
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  row.ok = true;
  std::cout << "# " << kToolVersion << "\n# config_digest " << digest(to_json(cfg)) << "\n";
  std::cout << csv_header() << "\n" << csv_row(row) << "\n";
  if (stats) {
    const Metrics& m = row.metrics;
    std::cout << "# collision_drops " << m.collision_drops << "\n# gate_drops " << m.gate_drops
              << "\n# ttl_drops " << m.ttl_drops << "\n# beacon_tx " << m.beacon_tx
              << "\n# control_tx " << m.control_tx << "\n# data_tx " << m.data_tx
              << "\n# collision_episodes " << rs.collision_episodes << "\n# half_duplex_losses "
              << rs.half_duplex_losses << "\n# events_processed " << rs.events_processed
              << "\n# end_time " << rs.end_time << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& grid_path, const std::string& out_path, unsigned threads) {
  const SweepGrid grid = load_grid(grid_path);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return 1;
  }
  run_sweep(grid, out, threads);
  return out ? 0 : 1;
}

int cmd_analyze(std::uint64_t trials, std::uint64_t seed, bool with_flood) {
  std::printf("quantity,params,formula,monte_carlo\n");
  for (double tau : {0.01, 0.05, 0.1, 0.2}) {
    const double exact = 2 * tau - tau * tau;
    std::printf("pair_collision,tau=%g,%.6f,%.6f\n", tau, exact,
                mc_pair_collision(tau, 1.0, trials, seed));
  }
  for (std::size_t k : {3, 6, 11, 16}) {
    const CellModel cell{static_cast<double>(k - 1), 0.01, 1.0};
    const double pa = mc_cell(ProtocolKind::Arbp, k, cell, trials, seed);
    const double pi = mc_cell(ProtocolKind::Ibsp, k, cell, trials, seed);
    std::printf("arbp_cell,k=%zu tau=0.01,%.6f,%.6f\n", k, prob_arbp(cell), pa);
    std::printf("ibsp_cell,k=%zu tau=0.01,%.6f,%.6f\n", k, prob_ibsp(cell), pi);
    std::printf("ibsp_over_arbp_sq,k=%zu tau=0.01,1,%.6f\n", k, pa > 0 ? pi / (pa * pa) : NAN);
  }
  std::printf("expected_neighbors,r=50 R=500 N=1000,%.6f,\n", expected_neighbors(50, 500, 1000));
  if (with_flood) {
    const FloodStats f = flood_statistics(1000, 500.0, 50.0, 5, 100, seed);
    std::printf("flood_tx,N=1000 R=500 r=50,%.1f,%.3f\n", expected_tx(FloodKind::Flood, 1000), f.flood_tx);
    std::printf("reachable,N=1000 R=500 r=50,,%.3f\n", f.reachable);
    std::printf("directed_tx,N=1000 R=500 r=50,%.1f,%.3f\n", expected_tx(FloodKind::Directed, 1000),
                f.confined_tx);
    std::printf("sender_gated_tx,N=1000 R=500 r=50,,%.3f\n", f.sender_gated_tx);
  }
  return 0;
}

int cmd_topology_gen(const SimConfig& cfg, const std::string& deployment, const std::string& out) {
  SimConfig c = cfg;
  if (!deployment.empty()) c = apply_overrides(c, {{"deployment", deployment}});
  if (c.nodes == 0) throw ConfigError("nodes: need at least one node");
  if (!(c.area > 0) || !(c.range_m > 0)) throw ConfigError("area and range must be positive");
  const Topology topo = make_topology(c, c.seed);
  if (out.empty() || out == "-") {
    write_topology(std::cout, topo);
  } else {
    std::ofstream f(out);
    if (!f) {
      std::cerr << "error: cannot write " << out << "\n";
      return 1;
    }
    write_topology(f, topo);
  }
  return 0;
}

int cmd_topology_load(const std::string& path, double range) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file " + path);
  Topology topo;
  try {
    topo = read_topology(in, range);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad topology file: ") + e.what());
  }
  std::printf("nodes,%zu\nrange_m,%g\nmean_degree,%.6f\n", topo.size(), topo.range(),
              topo.mean_degree());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Packet-level simulator for back-off MAC protocols in sensor networks"};
  app.require_subcommand(1);
  SimConfig cfg;

  std::string protocol, deployment, config_file, trace_path;
  auto* sim = app.add_subcommand("simulate", "run one simulation and print a CSV row");
  sim->add_option("--protocol", protocol, "arbp | ibsp | daibsp");
  sim->add_option("--nodes", cfg.nodes, "node count including the sink");
  sim->add_option("--lambda", cfg.lambda, "event rate (events/s)");
  sim->add_option("--alpha", cfg.alpha);
  sim->add_option("--beta", cfg.beta);
  sim->add_option("--seed", cfg.seed);
  sim->add_option("--events", cfg.total_events, "number of sensed events");
  sim->add_option("--area", cfg.area, "square side or disk radius (m)");
  sim->add_option("--range", cfg.range_m, "radio range (m)");
  sim->add_option("--deployment", deployment, "square | disk");
  sim->add_option("--config", config_file, "JSON file of config overrides");
  sim->add_option("--trace", trace_path, "write an event trace");
  bool stats = false;
  sim->add_flag("--stats", stats, "append drop and channel counters as comments");

  std::string grid_path, out_path;
  unsigned threads = 1;
  auto* sweep = app.add_subcommand("sweep", "run a parameter grid into a CSV file");
  sweep->add_option("--grid", grid_path, "grid JSON file")->required();
  sweep->add_option("--out", out_path, "output CSV")->required();
  sweep->add_option("--threads", threads, "parallel runs");

  std::uint64_t trials = 100000, aseed = 1;
  bool flood = false;
  auto* analyze = app.add_subcommand("analyze", "closed forms vs Monte Carlo, as CSV");
  analyze->add_option("--trials", trials);
  analyze->add_option("--seed", aseed);
  analyze->add_flag("--flood", flood, "include the idealized flood counts");

  auto* topo = app.add_subcommand("topology", "generate or inspect a node placement");
  topo->require_subcommand(1);
  std::string topo_out, topo_in;
  double load_range = 50.0;
  auto* gen = topo->add_subcommand("gen", "write a random placement");
  gen->add_option("--nodes", cfg.nodes);
  gen->add_option("--area", cfg.area);
  gen->add_option("--range", cfg.range_m);
  gen->add_option("--seed", cfg.seed);
  gen->add_option("--deployment", deployment);
  gen->add_option("--out", topo_out);
  auto* load = topo->add_subcommand("load", "summarize a placement file");
  load->add_option("file", topo_in)->required();
  load->add_option("--range", load_range);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(cfg, protocol, deployment, config_file, trace_path, stats);
    if (*sweep) return cmd_sweep(grid_path, out_path, threads);
    if (*analyze) return cmd_analyze(trials, aseed, flood);
    if (*gen) return cmd_topology_gen(cfg, deployment, topo_out);
    if (*load) return cmd_topology_load(topo_in, load_range);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
