#include "sdp/wire.hpp"

#include <string>
#include <type_traits>

namespace sdp::wire {
namespace {

class Writer {
 public:
  void u8(std::uint8_t x) { buf_.push_back(x); }
  void u32(std::uint32_t x) {
    for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(x >> s));
  }
  void u64(std::uint64_t x) {
    for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(x >> s));
  }
  void vertices(const std::vector<VertexId>& vs) {
    u32(static_cast<std::uint32_t>(vs.size()));
    for (const auto v : vs) u64(v.value);
  }
  void entries(const std::vector<ShardEntry>& es) {
    u32(static_cast<std::uint32_t>(es.size()));
    for (const auto& e : es) {
      u64(e.vertex.value);
      vertices(e.neighbors);
    }
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x = (x << 8) | b_[pos_++];
    return x;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x = (x << 8) | b_[pos_++];
    return x;
  }
  std::vector<VertexId> vertices() {
    const auto n = u32();
    need(static_cast<std::size_t>(n) * 8);
    std::vector<VertexId> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) out.emplace_back(u64());
    return out;
  }
  std::vector<ShardEntry> entries() {
    const auto n = u32();
    // Each entry needs at least 12 bytes; reject absurd counts before reserving.
    need(static_cast<std::size_t>(n) * 12);
    std::vector<ShardEntry> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      ShardEntry e;
      e.vertex = VertexId{u64()};
      e.neighbors = vertices();
      out.push_back(std::move(e));
    }
    return out;
  }
  void finish() const {
    if (pos_ != b_.size()) throw TransportError(std::to_string(b_.size() - pos_) + " trailing bytes in frame");
  }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw TransportError("truncated frame");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_{0};
};

template <class>
inline constexpr bool kAlwaysFalse = false;

}  // namespace

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Hello:
      return "Hello";
    case Kind::PlaceVertex:
      return "PlaceVertex";
    case Kind::DeleteVertex:
      return "DeleteVertex";
    case Kind::DeleteEdge:
      return "DeleteEdge";
    case Kind::MigrateBatch:
      return "MigrateBatch";
    case Kind::Ack:
      return "Ack";
    case Kind::Shutdown:
      return "Shutdown";
    case Kind::Snapshot:
      return "Snapshot";
    case Kind::SnapshotReply:
      return "SnapshotReply";
  }
  return "?";
}

Kind kind_of(const Message& m) {
  return std::visit(
      [](const auto& x) -> Kind {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Hello>) return Kind::Hello;
        else if constexpr (std::is_same_v<T, PlaceVertex>) return Kind::PlaceVertex;
        else if constexpr (std::is_same_v<T, DeleteVertex>) return Kind::DeleteVertex;
        else if constexpr (std::is_same_v<T, DeleteEdge>) return Kind::DeleteEdge;
        else if constexpr (std::is_same_v<T, MigrateBatch>) return Kind::MigrateBatch;
        else if constexpr (std::is_same_v<T, Ack>) return Kind::Ack;
        else if constexpr (std::is_same_v<T, Shutdown>) return Kind::Shutdown;
        else if constexpr (std::is_same_v<T, Snapshot>) return Kind::Snapshot;
        else if constexpr (std::is_same_v<T, SnapshotReply>) return Kind::SnapshotReply;
        else static_assert(kAlwaysFalse<T>);
      },
      m);
}

std::uint64_t seq_of(const Message& m) {
  return std::visit([](const auto& x) { return x.seq; }, m);
}

std::vector<std::uint8_t> encode(const Message& m) {
  Writer w;
  w.u32(0);  // patched below
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(kind_of(m)));
  std::visit(
      [&w](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        w.u64(x.seq);
        if constexpr (std::is_same_v<T, Hello>) {
          w.u32(x.partition.value);
        } else if constexpr (std::is_same_v<T, PlaceVertex>) {
          w.u32(x.partition.value);
          w.u64(x.vertex.value);
          w.vertices(x.neighbors);
        } else if constexpr (std::is_same_v<T, DeleteVertex>) {
          w.u64(x.vertex.value);
        } else if constexpr (std::is_same_v<T, DeleteEdge>) {
          w.u64(x.u.value);
          w.u64(x.w.value);
        } else if constexpr (std::is_same_v<T, MigrateBatch>) {
          w.u32(x.source.value);
          w.entries(x.entries);
        } else if constexpr (std::is_same_v<T, Ack>) {
          w.u32(x.partition.value);
          w.u8(static_cast<std::uint8_t>(x.status));
        } else if constexpr (std::is_same_v<T, SnapshotReply>) {
          w.u32(x.partition.value);
          w.entries(x.entries);
        }
      },
      m);
  auto& b = w.bytes();
  const auto len = static_cast<std::uint32_t>(b.size() - 4);
  if (len > kMaxFrame) throw TransportError("frame of " + std::to_string(len) + " bytes exceeds the limit");
  for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
  return std::move(b);
}

Message decode_body(std::span<const std::uint8_t> body) {
  Reader r(body);
  const auto version = r.u8();
  if (version != kVersion) {
    throw TransportError("protocol version " + std::to_string(version) + " not supported (expected " +
                         std::to_string(kVersion) + ")");
  }
  const auto kind = r.u8();
  const auto seq = r.u64();
  Message m;
  switch (static_cast<Kind>(kind)) {
    case Kind::Hello:
      m = Hello{seq, PartitionId{r.u32()}};
      break;
    case Kind::PlaceVertex: {
      PlaceVertex x{seq, PartitionId{r.u32()}, VertexId{r.u64()}, {}};
      x.neighbors = r.vertices();
      m = std::move(x);
      break;
    }
    case Kind::DeleteVertex:
      m = DeleteVertex{seq, VertexId{r.u64()}};
      break;
    case Kind::DeleteEdge: {
      const VertexId u{r.u64()};
      m = DeleteEdge{seq, u, VertexId{r.u64()}};
      break;
    }
    case Kind::MigrateBatch: {
      MigrateBatch x{seq, PartitionId{r.u32()}, {}};
      x.entries = r.entries();
      m = std::move(x);
      break;
    }
    case Kind::Ack: {
      const PartitionId p{r.u32()};
      const auto status = r.u8();
      if (status > 2) throw TransportError("unknown ack status " + std::to_string(status));
      m = Ack{seq, p, static_cast<AckStatus>(status)};
      break;
    }
    case Kind::Shutdown:
      m = Shutdown{seq};
      break;
    case Kind::Snapshot:
      m = Snapshot{seq};
      break;
    case Kind::SnapshotReply: {
      SnapshotReply x{seq, PartitionId{r.u32()}, {}};
      x.entries = r.entries();
      m = std::move(x);
      break;
    }
    default:
      throw TransportError("unknown message kind " + std::to_string(kind));
  }
  r.finish();
  return m;
}

Message decode(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw TransportError("truncated frame");
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | frame[i];
  if (len != frame.size() - 4) throw TransportError("length field does not match frame size");
  return decode_body(frame.subspan(4));
}

}  // namespace sdp::wire
