#include "sdp/scaler.hpp"

#include <string>

#include "sdp/assigner.hpp"

namespace sdp {

bool should_scale_out(std::uint64_t total_edges, std::size_t k, const ScalingConfig& cfg) {
  if (k == 0) throw InvalidPartition("scale-out check needs at least one partition");
  // maxcap * k <= total  <=>  maxcap <= floor(total / k), without the overflow.
  return cfg.maxcap <= total_edges / k;
}

PartitionId add_partition(PartitionSummary& s) { return s.add_partition(); }

std::optional<std::pair<PartitionId, PartitionId>> select_migration_pair(const StatsMap& stats,
                                                                         const ScalingConfig& cfg) {
  if (stats.size() < 2) return std::nullopt;
  const double l = cfg.scale_in_threshold();
  const double ceiling = cfg.destination_threshold();

  StatsMap low;
  for (const auto& [p, st] : stats) {
    if (static_cast<double>(st.load()) < l) low.emplace(p, st);
  }
  if (low.size() < 2) return std::nullopt;

  const PartitionId source = find_minimum_load(stats);
  const std::uint64_t source_load = stats.at(source).load();
  std::optional<PartitionId> destination;
  std::uint64_t best = 0;
  for (const auto& [p, st] : low) {
    if (p == source) continue;
    if (static_cast<double>(st.load() + source_load) > ceiling) continue;
    if (!destination || st.load() > best) {
      destination = p;
      best = st.load();
    }
  }
  if (!destination) return std::nullopt;
  return std::make_pair(source, *destination);
}

std::optional<MigrationPlan> plan_scale_in(const PartitionSummary& s, const ScalingConfig& cfg) {
  const auto pair = select_migration_pair(s.stats(), cfg);
  if (!pair) return std::nullopt;
  MigrationPlan plan;
  plan.source = pair->first;
  plan.destination = pair->second;
  plan.vertices = s.vertices(plan.source);
  plan.source_load = s.stats(plan.source).load();
  plan.destination_load = s.stats(plan.destination).load();

  // Each source-destination edge is counted on both sides now and becomes one internal edge.
  std::uint64_t shared = 0;
  for (const auto v : plan.vertices) {
    for (const auto n : s.adjacency(v)) {
      if (s.placement(n) == plan.destination) ++shared;
    }
  }
  plan.projected_dest_load = plan.destination_load + plan.source_load - shared;
  return plan;
}

void execute_migration(PartitionSummary& s, const MigrationPlan& plan, const ScalingConfig& cfg) {
  if (plan.source == plan.destination) throw StalePlan("migration source equals destination");
  if (!s.is_live(plan.source) || !s.is_live(plan.destination)) throw StalePlan("migration endpoint is no longer live");
  if (s.stats(plan.source).load() != plan.source_load || s.stats(plan.destination).load() != plan.destination_load)
    throw StalePlan("partition loads changed since the plan was made");
  if (s.vertices(plan.source) != plan.vertices) throw StalePlan("source residents changed since the plan was made");

  if (static_cast<double>(plan.projected_dest_load) > cfg.destination_threshold())
    throw StalePlan("plan would push the destination above the destination threshold");

  for (const auto v : plan.vertices) s.move_vertex(v, plan.destination);

  const auto after = s.stats(plan.destination).load();
  if (static_cast<double>(after) > cfg.destination_threshold())
    throw InvariantViolation("migration left partition " + std::to_string(plan.destination.value) + " above the destination threshold");
  s.retire_partition(plan.source);
}

}  // namespace sdp
