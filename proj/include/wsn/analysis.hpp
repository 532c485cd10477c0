#pragma once

#include <cstdint>

#include "wsn/core_types.hpp"
#include "wsn/protocols.hpp"

namespace wsn {

/// Single radio cell: n expected neighbours contending over a back-off
/// window of width T_max - T_min.
struct CellModel {
  double n = 0.0;
  Duration t_min = 0.0;
  Duration window_width = 1.0;

  // Throws std::invalid_argument unless window_width > 0 and n, t_min >= 0.
  void validate() const;
};

double expected_neighbors(double r, double R, double N);

double prob_arbp(const CellModel& cell);
double prob_ibsp(const CellModel& cell);

enum class FloodKind : std::uint8_t { Flood, Directed };
double expected_tx(FloodKind kind, double N);

/// Fraction of uniform pairs on [0, width] closer than t_min.
double mc_pair_collision(Duration t_min, Duration width, std::uint64_t trials, std::uint64_t seed);

/// Fraction of trials in which a tagged contender's data frame starts within
/// t_min of another contender's. ARBP and DAIBSP-less IBSP only; DAIBSP is
/// treated as IBSP since one cell has no hop structure.
double mc_cell(ProtocolKind protocol, std::size_t k, const CellModel& cell, std::uint64_t trials,
               std::uint64_t seed);

/// Idealized (collision-free) flood over a uniform disk with the sink at
/// the centre, averaged over random sources in the sink's component.
struct FloodStats {
  double reachable = 0.0;        // nodes reached by an unrestricted flood
  double flood_tx = 0.0;         // transmissions of the unrestricted flood
  double confined_tx = 0.0;      // flood confined to hop <= hop(source)
  double sender_gated_tx = 0.0;  // forward iff own hop <= sender's hop
  std::size_t sources = 0;
};

FloodStats flood_statistics(std::size_t N, double R, double r, std::size_t topologies,
                            std::size_t sources_per_topology, std::uint64_t seed);

}  // namespace wsn
