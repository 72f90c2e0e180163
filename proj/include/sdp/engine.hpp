#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdp/assigner.hpp"
#include "sdp/baselines.hpp"
#include "sdp/partition_state.hpp"
#include "sdp/random.hpp"
#include "sdp/scaler.hpp"

namespace sdp {

struct EngineConfig {
  ScalingConfig scaling{};
  GateDirection gate_direction{GateDirection::Prose};
  bool gate_enabled{true};
  /// Scale-out on the capacity rule and scale-in at interval boundaries.
  bool autoscale{true};
  std::uint32_t initial_partitions{1};
  Algorithm algorithm{Algorithm::Sdp};
  /// Per-partition vertex capacity for the LDG baseline.
  std::uint64_t ldg_capacity{0};
  std::uint64_t rng_seed{0};
  bool audit{false};

  void validate() const;
};

struct ScalingEvent {
  enum class Action : std::uint8_t { Add, Retire };
  std::uint64_t seq{0};
  Action action{Action::Add};
  PartitionId partition;
  std::uint64_t k_after{0};
  std::uint64_t total_edges{0};

  bool operator==(const ScalingEvent&) const = default;
};

struct AuditRecord {
  std::uint64_t seq{0};
  VertexId vertex;
  AssignmentDecision decision;
  double avg_d{0.0};
  double th{0.0};
};

/// Hooks invoked before the engine mutates its metadata. Throwing aborts the event and
/// leaves the engine state untouched, which is how remote acknowledgement gates placement.
class PlacementObserver {
 public:
  virtual ~PlacementObserver() = default;
  virtual void on_partition_added(PartitionId /*p*/) {}
  virtual void before_place(PartitionId /*p*/, VertexId /*v*/, std::span<const VertexId> /*stored_neighbors*/) {}
  virtual void before_delete_vertex(PartitionId /*owner*/, VertexId /*v*/) {}
  virtual void before_delete_edge(Edge /*e*/) {}
  virtual void before_migration(const MigrationPlan& /*plan*/, const PartitionSummary& /*s*/) {}
};

/// The event loop: dispatch on event kind, scale out, evaluate the balancing gate, assign,
/// update the summary. Single writer; events must arrive with seq == event_count().
class Engine {
 public:
  explicit Engine(EngineConfig cfg);

  /// Returns the decision for AddVertex events, nullopt otherwise.
  std::optional<AssignmentDecision> process_event(const GraphEvent& ev);

  /// Repeats plan_scale_in / execute_migration until no plan qualifies. Returns migrations run.
  std::size_t scale_in();

  void set_observer(PlacementObserver* observer) { observer_ = observer; }

  const EngineConfig& config() const { return cfg_; }
  const PartitionSummary& summary() const { return summary_; }
  const StatsMap& stats() const { return summary_.stats(); }
  /// edge^t: half-edges that have arrived so far (pending and later-deleted ones included).
  std::uint64_t edges_seen() const { return summary_.half_edges_added(); }
  /// cut^t: current cut half-edges, i.e. the sum of cut_edges over partitions.
  std::uint64_t cuts_seen() const { return summary_.cut_half_edges(); }
  std::uint64_t event_count() const { return event_count_; }
  std::uint64_t warn_count() const { return summary_.warn_count(); }
  std::size_t partition_count() const { return summary_.partition_count(); }

  const std::vector<ScalingEvent>& scaling_log() const { return scaling_log_; }
  const std::vector<AuditRecord>& audit_log() const { return audit_log_; }

  /// Gate inputs for the current state (quiet snapshot when k == 1 or the gate is off).
  BalanceSnapshot current_snapshot() const;

 private:
  AssignmentDecision decide(VertexId v, std::span<const VertexId> neighbors, const BalanceSnapshot& snap);
  std::vector<VertexId> stored_neighbors(VertexId v, std::span<const VertexId> neighbors) const;

  EngineConfig cfg_;
  PartitionSummary summary_;
  Rng rng_;
  std::uint64_t event_count_{0};
  std::vector<ScalingEvent> scaling_log_;
  std::vector<AuditRecord> audit_log_;
  PlacementObserver* observer_{nullptr};
};

/// "seq,action,partition_id,k_after,total_edges"
void write_scaling_log(const std::vector<ScalingEvent>& log, std::ostream& out);
/// "seq,vertex,partition,reason,connectivity,avg_d,th"
void write_audit_log(const std::vector<AuditRecord>& log, std::ostream& out);

}  // namespace sdp
