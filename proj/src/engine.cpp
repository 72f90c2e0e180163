#include "sdp/engine.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace sdp {
namespace {

void write_double(std::ostream& out, double x) {
  if (std::isinf(x)) {
    out << (x > 0 ? "inf" : "-inf");
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  out << buf;
}

}  // namespace

void EngineConfig::validate() const {
  if (initial_partitions == 0) throw ConfigError("at least one initial partition is required");
  if (algorithm == Algorithm::Sdp && autoscale) scaling.validate();
  if (algorithm == Algorithm::Ldg && ldg_capacity == 0) throw ConfigError("LDG needs a positive vertex capacity");
  if (algorithm != Algorithm::Sdp && autoscale) throw ConfigError("baselines run at a fixed partition count");
}

Engine::Engine(EngineConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.rng_seed) {
  cfg_.validate();
  for (std::uint32_t i = 0; i < cfg_.initial_partitions; ++i) summary_.add_partition();
}

BalanceSnapshot Engine::current_snapshot() const {
  if (!cfg_.gate_enabled || summary_.partition_count() < 2) return quiet_snapshot(edges_seen(), cuts_seen());
  return balance_snapshot(summary_.stats(), edges_seen(), cuts_seen());
}

AssignmentDecision Engine::decide(VertexId v, std::span<const VertexId> neighbors, const BalanceSnapshot& snap) {
  switch (cfg_.algorithm) {
    case Algorithm::Sdp: {
      const bool gated = cfg_.gate_enabled && summary_.partition_count() > 1;
      return assign_vertex(summary_, v, neighbors, snap, rng_, gated ? cfg_.gate_direction : GateDirection::Prose);
    }
    case Algorithm::Hash: {
      const auto live = summary_.live_partitions();
      const auto p = live[hash_assign(v, static_cast<std::uint32_t>(live.size()))];
      return {p, AssignReason::Baseline, connectivity(summary_, p, neighbors)};
    }
    case Algorithm::Ldg: {
      const auto p = ldg_assign(summary_, v, neighbors, cfg_.ldg_capacity);
      return {p, AssignReason::Baseline, connectivity(summary_, p, neighbors)};
    }
  }
  throw ConfigError("unknown algorithm");
}

std::optional<AssignmentDecision> Engine::process_event(const GraphEvent& ev) {
  if (ev.seq != event_count_) {
    throw OrderingError("event seq " + std::to_string(ev.seq) + " arrived, expected " + std::to_string(event_count_));
  }

  std::optional<AssignmentDecision> result;
  switch (ev.kind) {
    case EventKind::AddVertex: {
      if (summary_.is_placed(ev.vertex)) {
        throw DuplicatePlacement("seq " + std::to_string(ev.seq) + ": vertex " + std::to_string(ev.vertex.value) +
                                 " is already placed");
      }
      if (cfg_.autoscale) {
        const auto total = summary_.live_edge_count() + summary_.resolvable_edges(ev.vertex, ev.neighbors);
        if (should_scale_out(total, summary_.partition_count(), cfg_.scaling)) {
          const auto p = add_partition(summary_);
          scaling_log_.push_back({ev.seq, ScalingEvent::Action::Add, p, summary_.partition_count(), total});
          if (observer_) observer_->on_partition_added(p);
        }
      }
      const auto snap = current_snapshot();
      const auto decision = decide(ev.vertex, ev.neighbors, snap);
      if (observer_) {
        const auto stored = summary_.preview_adjacency(ev.vertex, ev.neighbors);
        const std::vector<VertexId> list(stored.begin(), stored.end());
        observer_->before_place(decision.partition, ev.vertex, list);
      }
      summary_.place_vertex(decision.partition, ev.vertex, ev.neighbors);
      if (cfg_.audit) audit_log_.push_back({ev.seq, ev.vertex, decision, snap.avg_d, snap.th});
      result = decision;
      break;
    }
    case EventKind::DeleteVertex: {
      if (observer_) {
        if (const auto owner = summary_.placement(ev.vertex)) observer_->before_delete_vertex(*owner, ev.vertex);
      }
      summary_.delete_vertex(ev.vertex);
      break;
    }
    case EventKind::DeleteEdge: {
      if (observer_ && (summary_.is_placed(ev.edge.src) || summary_.is_placed(ev.edge.dst))) {
        observer_->before_delete_edge(ev.edge);
      }
      summary_.delete_edge(ev.edge);
      break;
    }
  }
  ++event_count_;
  return result;
}

std::size_t Engine::scale_in() {
  if (!cfg_.autoscale) return 0;
  std::size_t migrations = 0;
  while (auto plan = plan_scale_in(summary_, cfg_.scaling)) {
    if (observer_) observer_->before_migration(*plan, summary_);
    execute_migration(summary_, *plan, cfg_.scaling);
    scaling_log_.push_back({event_count_, ScalingEvent::Action::Retire, plan->source, summary_.partition_count(),
                            summary_.live_edge_count()});
    ++migrations;
  }
  return migrations;
}

void write_scaling_log(const std::vector<ScalingEvent>& log, std::ostream& out) {
  out << "seq,action,partition_id,k_after,total_edges\n";
  for (const auto& e : log) {
    out << e.seq << ',' << (e.action == ScalingEvent::Action::Add ? "add" : "retire") << ',' << e.partition.value << ','
        << e.k_after << ',' << e.total_edges << '\n';
  }
}

void write_audit_log(const std::vector<AuditRecord>& log, std::ostream& out) {
  out << "seq,vertex,partition,reason,connectivity,avg_d,th\n";
  for (const auto& r : log) {
    out << r.seq << ',' << r.vertex.value << ',' << r.decision.partition.value << ',' << to_string(r.decision.reason)
        << ',' << r.decision.connectivity << ',';
    write_double(out, r.avg_d);
    out << ',';
    write_double(out, r.th);
    out << '\n';
  }
}

}  // namespace sdp
