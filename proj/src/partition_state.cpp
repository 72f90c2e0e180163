#include "sdp/partition_state.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>

namespace sdp {

void CapacityConfig::validate() const {
  if (maxcap == 0) throw ConfigError("maxcap must be positive");
  if (tolerance_parameter < 0.0 || tolerance_parameter > 100.0)
    throw ConfigError("tolerance parameter must lie in [0, 100]");
  if (dest_param < 0.0 || dest_param > 100.0) throw ConfigError("destination parameter must lie in [0, 100]");
  if (!(scale_in_threshold() < destination_threshold()))
    throw ConfigError("scale-in threshold l must be below the destination threshold");
}

PartitionId PartitionSummary::add_partition() {
  const PartitionId p{next_partition_++};
  partitions_.emplace(p, PartitionData{});
  stats_.emplace(p, PartitionStats{});
  return p;
}

void PartitionSummary::retire_partition(PartitionId p) {
  auto& data = live(p);
  if (!data.members.empty()) throw InvalidPartition("cannot retire non-empty partition " + std::to_string(p.value));
  partitions_.erase(p);
  stats_.erase(p);
  retired_.insert(p);
}

std::vector<PartitionId> PartitionSummary::live_partitions() const {
  std::vector<PartitionId> out;
  out.reserve(partitions_.size());
  for (const auto& [p, _] : partitions_) out.push_back(p);
  return out;
}

PartitionSummary::PartitionData& PartitionSummary::live(PartitionId p) {
  const auto it = partitions_.find(p);
  if (it == partitions_.end()) {
    throw InvalidPartition("partition " + std::to_string(p.value) + (retired_.contains(p) ? " is retired" : " does not exist"));
  }
  return it->second;
}

const PartitionSummary::PartitionData& PartitionSummary::live(PartitionId p) const {
  return const_cast<PartitionSummary*>(this)->live(p);
}

void PartitionSummary::account(PartitionId a, PartitionId b, bool add) {
  const auto apply = [add](std::uint64_t& counter, std::uint64_t& total) {
    if (add) {
      ++counter;
      ++total;
    } else {
      --counter;
      --total;
    }
  };
  if (a == b) {
    apply(stats_[a].internal_edges, internal_total_);
  } else {
    apply(stats_[a].cut_edges, cut_half_total_);
    apply(stats_[b].cut_edges, cut_half_total_);
  }
}

std::optional<PartitionId> PartitionSummary::placement(VertexId v) const {
  const auto it = placement_.find(v);
  if (it == placement_.end()) return std::nullopt;
  return it->second.partition;
}

const PartitionStats& PartitionSummary::stats(PartitionId p) const {
  const auto it = stats_.find(p);
  if (it == stats_.end()) throw InvalidPartition("partition " + std::to_string(p.value) + " is not live");
  return it->second;
}

std::vector<VertexId> PartitionSummary::vertices(PartitionId p) const {
  const auto& data = live(p);
  std::vector<VertexId> out;
  out.reserve(data.members.size());
  for (const auto& [_, v] : data.members) out.push_back(v);
  return out;
}

const std::set<VertexId>& PartitionSummary::adjacency(VertexId v) const {
  const auto it = placement_.find(v);
  if (it == placement_.end()) throw Error("vertex " + std::to_string(v.value) + " is not placed");
  return partitions_.at(it->second.partition).adjacency.at(v);
}

const std::unordered_map<VertexId, std::set<VertexId>>& PartitionSummary::partition_adjacency(PartitionId p) const {
  return live(p).adjacency;
}

std::vector<VertexId> PartitionSummary::pending_references(VertexId v) const {
  const auto it = pending_refs_.find(v);
  if (it == pending_refs_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::set<VertexId> PartitionSummary::preview_adjacency(VertexId v, std::span<const VertexId> neighbors) const {
  std::set<VertexId> stored;
  for (const auto n : neighbors) {
    if (n == v || deleted_vertices_.contains(n) || deleted_edges_.contains(Edge::normalized(v, n))) continue;
    stored.insert(n);
  }
  if (const auto it = pending_refs_.find(v); it != pending_refs_.end()) stored.insert(it->second.begin(), it->second.end());
  return stored;
}

std::uint64_t PartitionSummary::resolvable_edges(VertexId v, std::span<const VertexId> neighbors) const {
  std::uint64_t count = 0;
  for (const auto n : preview_adjacency(v, neighbors)) {
    if (n != v && placement_.contains(n)) ++count;
  }
  return count;
}

void PartitionSummary::place_vertex(PartitionId p, VertexId v, std::span<const VertexId> neighbors) {
  if (placement_.contains(v)) throw DuplicatePlacement("vertex " + std::to_string(v.value) + " is already placed");
  auto& data = live(p);
  deleted_vertices_.erase(v);
  std::set<VertexId> stored = preview_adjacency(v, neighbors);
  pending_refs_.erase(v);

  for (const auto n : stored) {
    const auto it = placement_.find(n);
    if (it == placement_.end()) {
      pending_refs_[n].insert(v);
      continue;
    }
    const PartitionId q = it->second.partition;
    if (partitions_.at(q).adjacency.at(n).insert(v).second) ++half_edges_added_;
    account(p, q, true);
  }

  half_edges_added_ += stored.size();
  data.adjacency.emplace(v, std::move(stored));
  const auto stamp = next_stamp_++;
  data.members.emplace(stamp, v);
  placement_.emplace(v, Placement{p, stamp});
  ++stats_[p].vertex_count;
}

bool PartitionSummary::delete_vertex(VertexId v) {
  const auto it = placement_.find(v);
  if (it == placement_.end()) {
    ++warn_count_;
    return false;
  }
  const Placement where = it->second;
  auto& data = partitions_.at(where.partition);
  auto node = data.adjacency.extract(v);
  for (const auto n : node.mapped()) {
    const auto nit = placement_.find(n);
    if (nit == placement_.end()) {
      auto pit = pending_refs_.find(n);
      pit->second.erase(v);
      if (pit->second.empty()) pending_refs_.erase(pit);
      continue;
    }
    const PartitionId q = nit->second.partition;
    partitions_.at(q).adjacency.at(n).erase(v);
    ++half_edges_removed_;
    account(where.partition, q, false);
  }
  half_edges_removed_ += node.mapped().size();
  data.members.erase(where.stamp);
  --stats_[where.partition].vertex_count;
  placement_.erase(it);
  deleted_vertices_.insert(v);
  return true;
}

bool PartitionSummary::delete_edge(Edge e) {
  e = Edge::normalized(e.src, e.dst);
  const auto pu = placement_.find(e.src);
  const auto pw = placement_.find(e.dst);
  const bool u_placed = pu != placement_.end();
  const bool w_placed = pw != placement_.end();
  if (e.is_self_loop() || (!u_placed && !w_placed)) {
    ++warn_count_;
    return false;
  }
  if (u_placed && w_placed) {
    auto& adj_u = partitions_.at(pu->second.partition).adjacency.at(e.src);
    if (!adj_u.contains(e.dst)) {
      ++warn_count_;
      return false;
    }
    adj_u.erase(e.dst);
    partitions_.at(pw->second.partition).adjacency.at(e.dst).erase(e.src);
    half_edges_removed_ += 2;
    account(pu->second.partition, pw->second.partition, false);
  } else {
    const VertexId resident = u_placed ? e.src : e.dst;
    const VertexId pending = u_placed ? e.dst : e.src;
    const auto where = u_placed ? pu->second.partition : pw->second.partition;
    auto& adj = partitions_.at(where).adjacency.at(resident);
    if (!adj.contains(pending)) {
      ++warn_count_;
      return false;
    }
    adj.erase(pending);
    auto pit = pending_refs_.find(pending);
    pit->second.erase(resident);
    if (pit->second.empty()) pending_refs_.erase(pit);
    ++half_edges_removed_;
  }
  deleted_edges_.insert(e);
  return true;
}

void PartitionSummary::move_vertex(VertexId v, PartitionId destination) {
  const auto it = placement_.find(v);
  if (it == placement_.end()) throw Error("cannot move unplaced vertex " + std::to_string(v.value));
  auto& dest = live(destination);
  const Placement from = it->second;
  if (from.partition == destination) return;
  auto& src = partitions_.at(from.partition);

  auto node = src.adjacency.extract(v);
  for (const auto n : node.mapped()) {
    const auto nit = placement_.find(n);
    if (nit == placement_.end()) continue;
    account(from.partition, nit->second.partition, false);
  }
  src.members.erase(from.stamp);
  --stats_[from.partition].vertex_count;

  const auto stamp = next_stamp_++;
  it->second = Placement{destination, stamp};
  dest.members.emplace(stamp, v);
  ++stats_[destination].vertex_count;
  for (const auto n : node.mapped()) {
    const auto nit = placement_.find(n);
    if (nit == placement_.end()) continue;
    account(destination, nit->second.partition, true);
  }
  dest.adjacency.insert(std::move(node));
}

StatsMap recompute_stats(const PartitionSummary& s) {
  StatsMap out;
  for (const auto p : s.live_partitions()) {
    PartitionStats st;
    std::uint64_t internal_half = 0;
    for (const auto& [v, nbrs] : s.partition_adjacency(p)) {
      ++st.vertex_count;
      for (const auto n : nbrs) {
        const auto q = s.placement(n);
        if (!q) continue;
        if (*q == p) {
          ++internal_half;
        } else {
          ++st.cut_edges;
        }
      }
    }
    st.internal_edges = internal_half / 2;
    out.emplace(p, st);
  }
  return out;
}

void check_invariants(const PartitionSummary& s) {
  const auto fail = [](const std::string& what) { throw InvariantViolation(what); };
  std::uint64_t placed = 0;
  std::uint64_t stored = 0;
  for (const auto p : s.live_partitions()) {
    const auto members = s.vertices(p);
    const auto& adj = s.partition_adjacency(p);
    if (members.size() != adj.size()) fail("partition " + std::to_string(p.value) + ": vertex set and adjacency differ in size");
    for (const auto v : members) {
      ++placed;
      if (s.placement(v) != p) fail("placement of vertex " + std::to_string(v.value) + " does not point back to its partition");
      const auto it = adj.find(v);
      if (it == adj.end()) fail("vertex " + std::to_string(v.value) + " has no adjacency entry");
      stored += it->second.size();
      for (const auto n : it->second) {
        if (s.is_deleted(n)) fail("adjacency of " + std::to_string(v.value) + " references deleted vertex " + std::to_string(n.value));
        if (const auto q = s.placement(n)) {
          if (!s.adjacency(n).contains(v)) fail("asymmetric edge " + std::to_string(v.value) + "-" + std::to_string(n.value));
        } else {
          const auto refs = s.pending_references(n);
          if (!std::binary_search(refs.begin(), refs.end(), v)) fail("pending endpoint missing from reference index");
        }
      }
    }
  }
  if (placed != s.live_vertex_count()) fail("placement index holds vertices absent from every partition");
  if (stored != s.stored_half_edges()) fail("half-edge counters disagree with stored adjacency");
  const auto truth = recompute_stats(s);
  if (truth != s.stats()) {
    std::ostringstream os;
    os << "incremental stats diverge from recomputation:";
    for (const auto& [p, st] : truth) {
      const auto& inc = s.stats(p);
      os << " P" << p.value << " truth(" << st.internal_edges << ',' << st.cut_edges << ',' << st.vertex_count << ") incr("
         << inc.internal_edges << ',' << inc.cut_edges << ',' << inc.vertex_count << ')';
    }
    fail(os.str());
  }
  std::uint64_t internal = 0;
  std::uint64_t cut = 0;
  for (const auto& [p, st] : truth) {
    internal += st.internal_edges;
    cut += st.cut_edges;
  }
  if (cut % 2 != 0) fail("odd cut half-edge total");
  if (internal + cut / 2 != s.live_edge_count() || cut != s.cut_half_edges()) fail("edge totals diverge from partition stats");
}

void write_assignment_snapshot(const PartitionSummary& s, std::ostream& out) {
  std::vector<std::pair<VertexId, PartitionId>> rows;
  rows.reserve(s.live_vertex_count());
  for (const auto p : s.live_partitions())
    for (const auto v : s.vertices(p)) rows.emplace_back(v, p);
  std::sort(rows.begin(), rows.end());
  for (const auto& [v, p] : rows) out << v.value << ',' << p.value << '\n';
}

}  // namespace sdp
