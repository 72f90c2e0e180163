#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sdp/types.hpp"

namespace sdp {

/// Per-partition load accounting. A cut edge counts once on each side, an internal edge once.
struct PartitionStats {
  std::uint64_t internal_edges{0};
  std::uint64_t cut_edges{0};
  std::uint64_t vertex_count{0};

  std::uint64_t load() const { return internal_edges + cut_edges; }
  bool operator==(const PartitionStats&) const = default;
};

using StatsMap = std::map<PartitionId, PartitionStats>;

/// Capacity and scale-in parameters, all in edge-load units.
struct CapacityConfig {
  std::uint64_t maxcap{0};
  double tolerance_parameter{20.0};
  double dest_param{5.0};

  /// Scale-in threshold l = tolerance_parameter * maxcap / 100.
  double scale_in_threshold() const { return tolerance_parameter * static_cast<double>(maxcap) / 100.0; }
  /// Reserved headroom d = dest_param * maxcap / 100.
  double reserve() const { return dest_param * static_cast<double>(maxcap) / 100.0; }
  /// A destination accepts load while it stays at or below maxcap - d.
  double destination_threshold() const { return static_cast<double>(maxcap) - reserve(); }

  /// Throws ConfigError unless maxcap > 0, both percentages lie in [0, 100] and l < maxcap - d.
  void validate() const;
};

/// Master-side metadata: which vertices live on which partition, and the adjacency each
/// partition stores for its residents.
///
/// Adjacency is kept symmetric between placed vertices. A neighbour that has not been
/// streamed yet is a pending endpoint: it is stored in the resident's list but carries no
/// load until it arrives, at which point the half-edge resolves to internal or cut.
/// Deleted vertices are remembered so later arrivals referencing them do not resurrect
/// edges; the same holds for deleted edges.
///
/// Partition ids are handed out monotonically; retired ids are tombstoned and never reused.
/// Single writer: callers serialize all mutations.
class PartitionSummary {
 public:
  PartitionSummary() = default;

  PartitionId add_partition();
  /// Retires an empty live partition. Throws InvalidPartition if it is unknown or non-empty.
  void retire_partition(PartitionId p);

  bool is_live(PartitionId p) const { return partitions_.contains(p); }
  bool is_retired(PartitionId p) const { return retired_.contains(p); }
  std::size_t partition_count() const { return partitions_.size(); }
  std::vector<PartitionId> live_partitions() const;
  const std::set<PartitionId>& retired_partitions() const { return retired_; }

  /// Places an unplaced vertex. Throws DuplicatePlacement or InvalidPartition.
  void place_vertex(PartitionId p, VertexId v, std::span<const VertexId> neighbors);
  /// Returns false (and bumps the warning counter) when v is not placed.
  bool delete_vertex(VertexId v);
  /// Returns false (and bumps the warning counter) when the edge is not stored.
  bool delete_edge(Edge e);
  /// Moves a placed vertex and its adjacency to another live partition.
  void move_vertex(VertexId v, PartitionId destination);

  std::optional<PartitionId> placement(VertexId v) const;
  bool is_placed(VertexId v) const { return placement_.contains(v); }
  bool is_deleted(VertexId v) const { return deleted_vertices_.contains(v); }

  /// Residents of p in insertion order.
  std::vector<VertexId> vertices(PartitionId p) const;
  /// Stored adjacency of a placed vertex (placed and pending neighbours), ascending.
  const std::set<VertexId>& adjacency(VertexId v) const;
  /// Stored adjacency of every resident of p.
  const std::unordered_map<VertexId, std::set<VertexId>>& partition_adjacency(PartitionId p) const;
  /// Placed vertices that hold `v` as a pending endpoint.
  std::vector<VertexId> pending_references(VertexId v) const;

  const StatsMap& stats() const { return stats_; }
  const PartitionStats& stats(PartitionId p) const;

  std::uint64_t live_vertex_count() const { return placement_.size(); }
  /// Edges with both endpoints placed.
  std::uint64_t live_edge_count() const { return internal_total_ + cut_half_total_ / 2; }
  /// Sum over partitions of cut_edges (each cut edge counted on both sides).
  std::uint64_t cut_half_edges() const { return cut_half_total_; }
  std::uint64_t cut_edge_count() const { return cut_half_total_ / 2; }

  /// Adjacency that place_vertex would store for v (self, deleted vertices and deleted
  /// edges filtered out, reverse pending references merged in).
  std::set<VertexId> preview_adjacency(VertexId v, std::span<const VertexId> neighbors) const;

  /// Number of live edges that placing v with `neighbors` would create, wherever it goes.
  std::uint64_t resolvable_edges(VertexId v, std::span<const VertexId> neighbors) const;

  /// Cumulative half-edges stored / removed since construction (pending ones included).
  std::uint64_t half_edges_added() const { return half_edges_added_; }
  std::uint64_t half_edges_removed() const { return half_edges_removed_; }
  std::uint64_t stored_half_edges() const { return half_edges_added_ - half_edges_removed_; }

  std::uint64_t warn_count() const { return warn_count_; }

 private:
  struct PartitionData {
    std::map<std::uint64_t, VertexId> members;
    std::unordered_map<VertexId, std::set<VertexId>> adjacency;
  };
  struct Placement {
    PartitionId partition;
    std::uint64_t stamp;
  };

  PartitionData& live(PartitionId p);
  const PartitionData& live(PartitionId p) const;
  void account(PartitionId a, PartitionId b, bool add);

  std::map<PartitionId, PartitionData> partitions_;
  StatsMap stats_;
  std::set<PartitionId> retired_;
  std::uint32_t next_partition_{0};

  std::unordered_map<VertexId, Placement> placement_;
  std::unordered_map<VertexId, std::set<VertexId>> pending_refs_;
  std::unordered_set<VertexId> deleted_vertices_;
  std::unordered_set<Edge> deleted_edges_;

  std::uint64_t next_stamp_{0};
  std::uint64_t internal_total_{0};
  std::uint64_t cut_half_total_{0};
  std::uint64_t half_edges_added_{0};
  std::uint64_t half_edges_removed_{0};
  std::uint64_t warn_count_{0};
};

/// Ground-truth stats from a full scan of the stored adjacency.
StatsMap recompute_stats(const PartitionSummary& s);

/// Throws InvariantViolation describing the first broken structural invariant:
/// placement/vertex-set inverse, adjacency symmetry, pending-reference index, no references
/// to deleted vertices, stats equal to recompute_stats.
void check_invariants(const PartitionSummary& s);

/// "vertex_id,partition_id" lines sorted by vertex id.
void write_assignment_snapshot(const PartitionSummary& s, std::ostream& out);

}  // namespace sdp
