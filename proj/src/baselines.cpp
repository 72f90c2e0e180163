#include "sdp/baselines.hpp"

#include "sdp/assigner.hpp"
#include "sdp/random.hpp"

namespace sdp {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "sdp") return Algorithm::Sdp;
  if (name == "hash") return Algorithm::Hash;
  if (name == "ldg") return Algorithm::Ldg;
  throw ConfigError("unknown algorithm '" + name + "' (expected sdp, hash or ldg)");
}

const char* to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::Sdp:
      return "sdp";
    case Algorithm::Hash:
      return "hash";
    case Algorithm::Ldg:
      return "ldg";
  }
  return "?";
}

std::uint32_t hash_assign(VertexId v, std::uint32_t k) {
  if (k == 0) throw InvalidPartition("hash partitioning needs k >= 1");
  return static_cast<std::uint32_t>(mix64(v.value) % k);
}

PartitionId ldg_assign(const PartitionSummary& s, VertexId v, std::span<const VertexId> neighbors,
                       std::uint64_t cap) {
  if (s.partition_count() == 0) throw InvalidPartition("no live partition to assign to");
  if (cap == 0) throw ConfigError("LDG capacity must be positive");
  const auto conn = connectivity_all(s, v, neighbors);

  bool any_room = false;
  for (const auto& [p, st] : s.stats()) any_room = any_room || st.vertex_count < cap;

  const PartitionId* best = nullptr;
  double best_score = 0.0;
  std::uint64_t best_count = 0;
  for (const auto& [p, st] : s.stats()) {
    if (any_room && st.vertex_count >= cap) continue;
    const double fill = static_cast<double>(st.vertex_count) / static_cast<double>(cap);
    const double score = static_cast<double>(conn.at(p)) * (1.0 - fill);
    if (!best || score > best_score || (score == best_score && st.vertex_count < best_count)) {
      best = &p;
      best_score = score;
      best_count = st.vertex_count;
    }
  }
  return *best;
}

}  // namespace sdp
