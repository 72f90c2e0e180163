#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "sdp/partition_state.hpp"

namespace sdp {

enum class Algorithm : std::uint8_t { Sdp, Hash, Ldg };

Algorithm parse_algorithm(const std::string& name);
const char* to_string(Algorithm algo);

/// Index in [0, k): mix64(v) mod k, where mix64 is the splitmix64 finalizer.
std::uint32_t hash_assign(VertexId v, std::uint32_t k);

/// Linear deterministic greedy: maximizes connectivity(p) * (1 - vertex_count(p) / cap).
///
/// Partitions already holding `cap` vertices are skipped while any other partition has
/// room. Equal scores go to the partition with fewer vertices, then to the lowest id.
PartitionId ldg_assign(const PartitionSummary& s, VertexId v, std::span<const VertexId> neighbors,
                       std::uint64_t cap);

}  // namespace sdp
