#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "sdp/partition_state.hpp"
#include "sdp/random.hpp"

namespace sdp {

/// Balancing quantities evaluated at one event.
struct BalanceSnapshot {
  double avg_d{0.0};     ///< (highest load - lowest load) / k
  double load_dev{0.0};  ///< population standard deviation of partition loads
  double w_dev{0.0};     ///< (edges_seen / cuts_seen) * load_dev, +inf when cuts_seen == 0
  double th{0.0};        ///< w_dev - load_dev
  std::uint64_t edges_seen{0};
  std::uint64_t cuts_seen{0};
  bool intervene{false};  ///< avg_d > th
};

/// `Baseline` marks decisions taken by a comparator policy instead of the SDP rule.
enum class AssignReason : std::uint8_t { MaxConnectivity, TieMinLoad, Random, BalanceMinLoad, Baseline };

const char* to_string(AssignReason reason);

struct AssignmentDecision {
  PartitionId partition;
  AssignReason reason{AssignReason::Random};
  std::uint64_t connectivity{0};

  bool operator==(const AssignmentDecision&) const = default;
};

/// Which branch the balancing gate selects when it fires.
///  - Prose: imbalance above the threshold sends the vertex to the least-loaded partition.
///  - Listing: the inverted routing (gate firing runs the connectivity rule, otherwise min-load).
enum class GateDirection : std::uint8_t { Prose, Listing };

GateDirection parse_gate_direction(const std::string& name);
const char* to_string(GateDirection direction);

/// |{u in neighbors : placement(u) == p}|, counting each distinct neighbour once.
std::uint64_t connectivity(const PartitionSummary& s, PartitionId p, std::span<const VertexId> neighbors);

/// Connectivity of every live partition (zero entries included).
std::map<PartitionId, std::uint64_t> connectivity_all(const PartitionSummary& s, VertexId v,
                                                      std::span<const VertexId> neighbors);

/// Least-loaded partition; ties go to the lowest id. Throws InvalidPartition on an empty map.
PartitionId find_minimum_load(const StatsMap& stats);

BalanceSnapshot balance_snapshot(const StatsMap& stats, std::uint64_t edges_seen, std::uint64_t cuts_seen);

/// Snapshot used when the gate is not evaluated (single partition or gate disabled).
BalanceSnapshot quiet_snapshot(std::uint64_t edges_seen, std::uint64_t cuts_seen);

/// Placement decision for an arriving vertex. Does not mutate the summary.
///
/// If the gate fires (per `direction`) the least-loaded partition wins. Otherwise the
/// partition holding most of v's neighbours wins; ties among several maxima go to the
/// least-loaded of them; with no placed neighbour at all a partition is drawn uniformly
/// from `rng` (no draw happens when only one partition is live).
AssignmentDecision assign_vertex(const PartitionSummary& s, VertexId v, std::span<const VertexId> neighbors,
                                 const BalanceSnapshot& snap, Rng& rng,
                                 GateDirection direction = GateDirection::Prose);

}  // namespace sdp
