#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "sdp/types.hpp"

namespace sdp::wire {

inline constexpr std::uint8_t kVersion = 1;
/// Upper bound on the length field; larger frames are rejected before allocation.
inline constexpr std::uint32_t kMaxFrame = 64u << 20;

enum class Kind : std::uint8_t {
  Hello = 1,
  PlaceVertex = 2,
  DeleteVertex = 3,
  DeleteEdge = 4,
  MigrateBatch = 5,
  Ack = 6,
  Shutdown = 7,
  Snapshot = 8,
  SnapshotReply = 9,
};

const char* to_string(Kind k);

enum class AckStatus : std::uint8_t { Applied = 0, Duplicate = 1, Rejected = 2 };

/// A vertex with its stored adjacency, as carried by MigrateBatch and SnapshotReply.
struct ShardEntry {
  VertexId vertex;
  std::vector<VertexId> neighbors;
  bool operator==(const ShardEntry&) const = default;
};

struct Hello {
  std::uint64_t seq{0};
  PartitionId partition;
  bool operator==(const Hello&) const = default;
};
/// Sent to the owner (which stores v) and to every worker holding a placed neighbour
/// (which links v into that neighbour's list).
struct PlaceVertex {
  std::uint64_t seq{0};
  PartitionId partition;
  VertexId vertex;
  std::vector<VertexId> neighbors;
  bool operator==(const PlaceVertex&) const = default;
};
struct DeleteVertex {
  std::uint64_t seq{0};
  VertexId vertex;
  bool operator==(const DeleteVertex&) const = default;
};
struct DeleteEdge {
  std::uint64_t seq{0};
  VertexId u;
  VertexId w;
  bool operator==(const DeleteEdge&) const = default;
};
struct MigrateBatch {
  std::uint64_t seq{0};
  PartitionId source;
  std::vector<ShardEntry> entries;
  bool operator==(const MigrateBatch&) const = default;
};
struct Ack {
  std::uint64_t seq{0};
  PartitionId partition;
  AckStatus status{AckStatus::Applied};
  bool operator==(const Ack&) const = default;
};
struct Shutdown {
  std::uint64_t seq{0};
  bool operator==(const Shutdown&) const = default;
};
struct Snapshot {
  std::uint64_t seq{0};
  bool operator==(const Snapshot&) const = default;
};
struct SnapshotReply {
  std::uint64_t seq{0};
  PartitionId partition;
  std::vector<ShardEntry> entries;
  bool operator==(const SnapshotReply&) const = default;
};

using Message = std::variant<Hello, PlaceVertex, DeleteVertex, DeleteEdge, MigrateBatch, Ack, Shutdown, Snapshot,
                             SnapshotReply>;

Kind kind_of(const Message& m);
std::uint64_t seq_of(const Message& m);

/// Full frame: length, version, kind, payload.
std::vector<std::uint8_t> encode(const Message& m);

/// Decodes the bytes that follow the length field (version, kind, payload).
/// Throws TransportError on a version mismatch, unknown kind, short or trailing bytes.
Message decode_body(std::span<const std::uint8_t> body);

/// Decodes one complete frame including its length prefix.
Message decode(std::span<const std::uint8_t> frame);

}  // namespace sdp::wire
