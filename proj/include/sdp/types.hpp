#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdp {

/// Identifier of a graph vertex. Stable for the lifetime of a run.
struct VertexId {
  std::uint64_t value{0};

  constexpr VertexId() = default;
  constexpr explicit VertexId(std::uint64_t v) : value(v) {}

  constexpr auto operator<=>(const VertexId&) const = default;
};

/// Identifier of a partition (one worker machine). Retired ids are never reused.
struct PartitionId {
  std::uint32_t value{0};

  constexpr PartitionId() = default;
  constexpr explicit PartitionId(std::uint32_t v) : value(v) {}

  constexpr auto operator<=>(const PartitionId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, VertexId v) { return os << v.value; }
inline std::ostream& operator<<(std::ostream& os, PartitionId p) { return os << 'P' << p.value; }

/// Undirected edge. Construct through `Edge::normalized` to get the canonical (min, max) order.
struct Edge {
  VertexId src;
  VertexId dst;

  static constexpr Edge normalized(VertexId a, VertexId b) {
    return a <= b ? Edge{a, b} : Edge{b, a};
  }

  constexpr bool is_self_loop() const { return src == dst; }
  constexpr auto operator<=>(const Edge&) const = default;
};

enum class EventKind : std::uint8_t { AddVertex, DeleteVertex, DeleteEdge };

/// One element of a dynamic graph stream.
///
/// AddVertex carries the vertex and the edges arriving with it (`neighbors`), which may
/// reference vertices that have not been streamed yet. DeleteVertex carries only `vertex`;
/// DeleteEdge carries only `edge`.
struct GraphEvent {
  EventKind kind{EventKind::AddVertex};
  std::uint64_t seq{0};
  VertexId vertex;
  std::vector<VertexId> neighbors;
  Edge edge;

  static GraphEvent add(std::uint64_t seq, VertexId v, std::vector<VertexId> nbrs) {
    GraphEvent ev;
    ev.kind = EventKind::AddVertex;
    ev.seq = seq;
    ev.vertex = v;
    ev.neighbors = std::move(nbrs);
    return ev;
  }
  static GraphEvent delete_vertex(std::uint64_t seq, VertexId v) {
    GraphEvent ev;
    ev.kind = EventKind::DeleteVertex;
    ev.seq = seq;
    ev.vertex = v;
    return ev;
  }
  static GraphEvent delete_edge(std::uint64_t seq, Edge e) {
    GraphEvent ev;
    ev.kind = EventKind::DeleteEdge;
    ev.seq = seq;
    ev.edge = Edge::normalized(e.src, e.dst);
    return ev;
  }

  bool operator==(const GraphEvent&) const = default;
};

const char* to_string(EventKind kind);

// Error hierarchy. Everything thrown by the library derives from sdp::Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DuplicatePlacement : public Error {
 public:
  using Error::Error;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

class StalePlan : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdp

template <>
struct std::hash<sdp::VertexId> {
  std::size_t operator()(sdp::VertexId v) const noexcept { return std::hash<std::uint64_t>{}(v.value); }
};

template <>
struct std::hash<sdp::PartitionId> {
  std::size_t operator()(sdp::PartitionId p) const noexcept { return std::hash<std::uint32_t>{}(p.value); }
};

template <>
struct std::hash<sdp::Edge> {
  std::size_t operator()(const sdp::Edge& e) const noexcept {
    return std::hash<std::uint64_t>{}(e.src.value * 0x9E3779B97F4A7C15ULL ^ e.dst.value);
  }
};
