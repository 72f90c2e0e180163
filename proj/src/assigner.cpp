#include "sdp/assigner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace sdp {

const char* to_string(AssignReason reason) {
  switch (reason) {
    case AssignReason::MaxConnectivity:
      return "max-connectivity";
    case AssignReason::TieMinLoad:
      return "tie-min-load";
    case AssignReason::Random:
      return "random";
    case AssignReason::BalanceMinLoad:
      return "balance-min-load";
    case AssignReason::Baseline:
      return "baseline";
  }
  return "?";
}

GateDirection parse_gate_direction(const std::string& name) {
  if (name == "prose") return GateDirection::Prose;
  if (name == "listing") return GateDirection::Listing;
  throw ConfigError("unknown gate direction '" + name + "' (expected prose or listing)");
}

const char* to_string(GateDirection direction) { return direction == GateDirection::Prose ? "prose" : "listing"; }

std::uint64_t connectivity(const PartitionSummary& s, PartitionId p, std::span<const VertexId> neighbors) {
  std::set<VertexId> distinct(neighbors.begin(), neighbors.end());
  std::uint64_t count = 0;
  for (const auto u : distinct) {
    if (s.placement(u) == p) ++count;
  }
  return count;
}

std::map<PartitionId, std::uint64_t> connectivity_all(const PartitionSummary& s, VertexId v,
                                                      std::span<const VertexId> neighbors) {
  std::map<PartitionId, std::uint64_t> out;
  for (const auto p : s.live_partitions()) out.emplace(p, 0);
  std::set<VertexId> distinct(neighbors.begin(), neighbors.end());
  distinct.erase(v);
  for (const auto u : distinct) {
    if (const auto q = s.placement(u)) ++out[*q];
  }
  return out;
}

PartitionId find_minimum_load(const StatsMap& stats) {
  if (stats.empty()) throw InvalidPartition("no live partition to choose from");
  auto best = stats.begin();
  for (auto it = std::next(stats.begin()); it != stats.end(); ++it) {
    if (it->second.load() < best->second.load()) best = it;
  }
  return best->first;
}

BalanceSnapshot balance_snapshot(const StatsMap& stats, std::uint64_t edges_seen, std::uint64_t cuts_seen) {
  BalanceSnapshot snap;
  snap.edges_seen = edges_seen;
  snap.cuts_seen = cuts_seen;
  if (stats.empty()) return quiet_snapshot(edges_seen, cuts_seen);

  const double k = static_cast<double>(stats.size());
  std::uint64_t hi = 0;
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  double sum = 0.0;
  for (const auto& [_, st] : stats) {
    hi = std::max(hi, st.load());
    lo = std::min(lo, st.load());
    sum += static_cast<double>(st.load());
  }
  const double mean = sum / k;
  double sq = 0.0;
  for (const auto& [_, st] : stats) {
    const double d = static_cast<double>(st.load()) - mean;
    sq += d * d;
  }
  snap.load_dev = std::sqrt(sq / k);
  snap.avg_d = static_cast<double>(hi - lo) / k;
  snap.w_dev = cuts_seen == 0 ? std::numeric_limits<double>::infinity()
                              : static_cast<double>(edges_seen) / static_cast<double>(cuts_seen) * snap.load_dev;
  snap.th = snap.w_dev - snap.load_dev;
  snap.intervene = snap.avg_d > snap.th;
  return snap;
}

BalanceSnapshot quiet_snapshot(std::uint64_t edges_seen, std::uint64_t cuts_seen) {
  BalanceSnapshot snap;
  snap.edges_seen = edges_seen;
  snap.cuts_seen = cuts_seen;
  snap.w_dev = std::numeric_limits<double>::infinity();
  snap.th = std::numeric_limits<double>::infinity();
  return snap;
}

AssignmentDecision assign_vertex(const PartitionSummary& s, VertexId v, std::span<const VertexId> neighbors,
                                 const BalanceSnapshot& snap, Rng& rng, GateDirection direction) {
  if (s.is_placed(v)) throw DuplicatePlacement("vertex " + std::to_string(v.value) + " is already placed");
  if (s.partition_count() == 0) throw InvalidPartition("no live partition to assign to");

  const auto conn = connectivity_all(s, v, neighbors);
  const bool min_load_route = direction == GateDirection::Prose ? snap.intervene : !snap.intervene;
  if (min_load_route) {
    const auto p = find_minimum_load(s.stats());
    return {p, AssignReason::BalanceMinLoad, conn.at(p)};
  }

  std::uint64_t best = 0;
  for (const auto& [_, c] : conn) best = std::max(best, c);
  if (best == 0) {
    const auto live = s.live_partitions();
    const auto idx = live.size() == 1 ? 0 : rng.below(live.size());
    return {live[idx], AssignReason::Random, 0};
  }

  StatsMap tied;
  for (const auto& [p, c] : conn) {
    if (c == best) tied.emplace(p, s.stats(p));
  }
  if (tied.size() == 1) return {tied.begin()->first, AssignReason::MaxConnectivity, best};
  return {find_minimum_load(tied), AssignReason::TieMinLoad, best};
}

}  // namespace sdp
