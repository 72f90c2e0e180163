#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sdp/partition_state.hpp"

namespace sdp {

using ScalingConfig = CapacityConfig;

/// Drains one partition into another and retires the source.
struct MigrationPlan {
  PartitionId source;
  PartitionId destination;
  std::vector<VertexId> vertices;         ///< every resident of source, insertion order
  std::uint64_t projected_dest_load{0};  ///< exact destination load after the move
  std::uint64_t source_load{0};           ///< loads observed at planning time
  std::uint64_t destination_load{0};
};

/// maxcap <= total_edges / k, evaluated exactly.
bool should_scale_out(std::uint64_t total_edges, std::size_t k, const ScalingConfig& cfg);

PartitionId add_partition(PartitionSummary& s);

/// Source/destination choice on loads alone.
///
/// Needs two live partitions below l. Source is the least-loaded partition; destination is
/// the most-loaded other partition below l whose load plus the source load stays within
/// the destination threshold (ties to the lowest id).
std::optional<std::pair<PartitionId, PartitionId>> select_migration_pair(const StatsMap& stats,
                                                                         const ScalingConfig& cfg);

/// Full plan including the vertex list and the exact projected destination load.
std::optional<MigrationPlan> plan_scale_in(const PartitionSummary& s, const ScalingConfig& cfg);

/// Moves every planned vertex, checks the capacity bound, retires the source.
/// Throws StalePlan if loads or residents changed since planning.
void execute_migration(PartitionSummary& s, const MigrationPlan& plan, const ScalingConfig& cfg);

}  // namespace sdp
