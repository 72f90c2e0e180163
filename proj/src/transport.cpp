#include "sdp/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>
#include <thread>
#include <type_traits>

namespace sdp::net {
namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw TransportError("cannot resolve host '" + ep.host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return addr;
}

enum class ReadResult { Done, Timeout, Closed };

// Reads exactly buf.size() bytes. A timeout before the first byte is reported as Timeout;
// once a frame has started, a few more timeouts are tolerated before giving up.
ReadResult read_exact(int fd, std::span<std::uint8_t> buf, bool frame_started) {
  std::size_t got = 0;
  int stalls = 0;
  while (got < buf.size()) {
    const auto n = ::recv(fd, buf.data() + got, buf.size() - got, 0);
    if (n > 0) {
      got += static_cast<std::size_t>(n);
      continue;
    }
    if (n == 0) return ReadResult::Closed;
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) {
      if (got == 0 && !frame_started) return ReadResult::Timeout;
      if (++stalls > 10) throw TransportError("peer stalled in the middle of a frame");
      continue;
    }
    throw TransportError(sys_error("recv"));
  }
  return ReadResult::Done;
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  auto port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    ep.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const auto port = std::stoul(port_text, &used);
    if (used != port_text.size() || port > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::logic_error&) {
    throw ConfigError("bad endpoint '" + text + "' (expected host:port)");
  }
  if (ep.host.empty()) ep.host = "127.0.0.1";
  return ep;
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port); }

Socket& Socket::operator=(Socket&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = std::exchange(o.fd_, -1);
  }
  return *this;
}

Socket::~Socket() { close(); }

void Socket::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

Socket Socket::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
  const auto addr = resolve(ep);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    Socket s(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!s.valid()) throw TransportError(sys_error("socket"));
    if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
      int one = 1;
      ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return s;
    }
    if (std::chrono::steady_clock::now() >= deadline) throw TransportError(sys_error("connect to " + ep.str()));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void Socket::set_timeout(std::chrono::milliseconds t) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(t.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((t.count() % 1000) * 1000);
  if (::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv) != 0) throw TransportError(sys_error("setsockopt"));
}

void Socket::write_frame(const wire::Message& m) {
  const auto bytes = wire::encode(m);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET) throw ConnectionClosed("peer closed the connection");
      throw TransportError(sys_error("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::optional<wire::Message> Socket::read_frame() {
  std::uint8_t head[4];
  switch (read_exact(fd_, head, false)) {
    case ReadResult::Timeout:
      return std::nullopt;
    case ReadResult::Closed:
      throw ConnectionClosed("peer closed the connection");
    case ReadResult::Done:
      break;
  }
  std::uint32_t len = 0;
  for (const auto b : head) len = (len << 8) | b;
  if (len < 2 || len > wire::kMaxFrame) throw TransportError("bad frame length " + std::to_string(len));
  std::vector<std::uint8_t> body(len);
  if (read_exact(fd_, body, true) != ReadResult::Done) throw ConnectionClosed("connection closed mid-frame");
  return wire::decode_body(body);
}

Listener::Listener(const Endpoint& ep) {
  const auto addr = resolve(ep);
  fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw TransportError(sys_error("socket"));
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const auto msg = sys_error("bind " + ep.str());
    ::close(fd_);
    throw TransportError(msg);
  }
  if (::listen(fd_, 4) != 0) {
    ::close(fd_);
    throw TransportError(sys_error("listen"));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

Listener::Listener(Listener&& o) noexcept : fd_(std::exchange(o.fd_, -1)), port_(o.port_) {}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

Socket Listener::accept() {
  for (;;) {
    const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno != EINTR) throw TransportError(sys_error("accept"));
  }
}

// ---------------------------------------------------------------------------------------------
// Worker

wire::Ack ShardStore::ack(std::uint64_t seq, wire::AckStatus status) const {
  return {seq, partition_.value_or(PartitionId{0}), status};
}

wire::Message ShardStore::apply(const wire::Message& m) {
  using namespace wire;
  if (const auto* snap = std::get_if<Snapshot>(&m)) {
    SnapshotReply reply{snap->seq, partition_.value_or(PartitionId{0}), {}};
    for (const auto& [v, nbrs] : shard_) reply.entries.push_back({v, {nbrs.begin(), nbrs.end()}});
    return reply;
  }
  if (std::holds_alternative<Ack>(m) || std::holds_alternative<SnapshotReply>(m)) {
    return ack(seq_of(m), AckStatus::Rejected);
  }
  const auto seq = seq_of(m);
  if (applied_.contains(seq)) return ack(seq, AckStatus::Duplicate);

  bool ok = true;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Hello>) {
          if (partition_ && *partition_ != x.partition) {
            ok = false;
          } else {
            partition_ = x.partition;
          }
        } else if constexpr (std::is_same_v<T, PlaceVertex>) {
          if (!partition_) {
            ok = false;
            return;
          }
          for (const auto u : x.neighbors) {
            if (auto it = shard_.find(u); it != shard_.end()) it->second.insert(x.vertex);
          }
          if (x.partition == *partition_) shard_[x.vertex] = {x.neighbors.begin(), x.neighbors.end()};
        } else if constexpr (std::is_same_v<T, DeleteVertex>) {
          shard_.erase(x.vertex);
          for (auto& [_, nbrs] : shard_) nbrs.erase(x.vertex);
        } else if constexpr (std::is_same_v<T, DeleteEdge>) {
          if (auto it = shard_.find(x.u); it != shard_.end()) it->second.erase(x.w);
          if (auto it = shard_.find(x.w); it != shard_.end()) it->second.erase(x.u);
        } else if constexpr (std::is_same_v<T, MigrateBatch>) {
          for (const auto& e : x.entries) shard_[e.vertex] = {e.neighbors.begin(), e.neighbors.end()};
        } else if constexpr (std::is_same_v<T, Shutdown>) {
          shard_.clear();
          shutdown_ = true;
        }
      },
      m);
  if (!ok) return ack(seq, AckStatus::Rejected);
  applied_.insert(seq);
  return ack(seq, AckStatus::Applied);
}

WorkerServer::WorkerServer(const Endpoint& listen) : listener_(listen) {}

void WorkerServer::serve() {
  while (!store_.shutdown_requested()) {
    auto conn = listener_.accept();
    try {
      while (!store_.shutdown_requested()) {
        const auto m = conn.read_frame();
        if (!m) continue;
        conn.write_frame(store_.apply(*m));
      }
    } catch (const ConnectionClosed&) {
      return;
    }
  }
}

void serve_worker(const Endpoint& listen, const std::function<void(std::uint16_t)>& on_listening) {
  WorkerServer server(listen);
  if (on_listening) on_listening(server.port());
  server.serve();
}

// ---------------------------------------------------------------------------------------------
// Master

DistributedDispatcher::DistributedDispatcher(const PartitionSummary& summary, WorkerProvider provider,
                                             DispatchOptions opts)
    : summary_(summary), provider_(std::move(provider)), opts_(opts) {}

DistributedDispatcher::~DistributedDispatcher() = default;

void DistributedDispatcher::attach_existing() {
  for (const auto p : summary_.live_partitions()) {
    if (!registry_.contains(p)) on_partition_added(p);
  }
}

void DistributedDispatcher::on_partition_added(PartitionId p) {
  const auto ep = provider_(p);
  auto sock = Socket::connect(ep, opts_.timeout);
  sock.set_timeout(opts_.timeout);
  connections_[p] = std::move(sock);
  registry_[p] = {ep, std::chrono::steady_clock::now()};
  hello(p);
}

void DistributedDispatcher::hello(PartitionId p) { roundtrip(p, wire::Hello{next_seq_++, p}); }

wire::Message DistributedDispatcher::roundtrip(PartitionId p, const wire::Message& m) {
  auto it = connections_.find(p);
  if (it == connections_.end()) throw TransportError("no worker registered for partition " + std::to_string(p.value));
  auto& sock = it->second;
  const auto seq = wire::seq_of(m);
  const auto describe = [&] {
    return std::string(wire::to_string(wire::kind_of(m))) + " seq " + std::to_string(seq) + " to partition " +
           std::to_string(p.value) + " at " + registry_.at(p).endpoint.str();
  };

  for (unsigned attempt = 0; attempt <= opts_.retries; ++attempt) {
    if (attempt > 0) ++retransmissions_;
    try {
      sock.write_frame(m);
      if (opts_.duplicate_delivery) sock.write_frame(m);
      for (;;) {
        const auto reply = sock.read_frame();
        if (!reply) break;  // timeout: retransmit
        if (wire::seq_of(*reply) != seq) continue;  // late reply to an earlier attempt
        if (const auto* a = std::get_if<wire::Ack>(&*reply); a && a->status == wire::AckStatus::Rejected) {
          throw TransportError("worker rejected " + describe());
        }
        registry_.at(p).last_ack = std::chrono::steady_clock::now();
        return *reply;
      }
    } catch (const ConnectionClosed& e) {
      throw TransportError("worker suspect, connection lost during " + describe() + ": " + e.what());
    }
  }
  throw TransportError("worker suspect, no reply to " + describe() + " after " + std::to_string(opts_.retries + 1) +
                       " attempts");
}

std::set<PartitionId> DistributedDispatcher::neighbour_owners(std::span<const VertexId> vs, PartitionId except) const {
  std::set<PartitionId> out;
  for (const auto u : vs) {
    if (const auto q = summary_.placement(u); q && *q != except) out.insert(*q);
  }
  return out;
}

void DistributedDispatcher::before_place(PartitionId p, VertexId v, std::span<const VertexId> stored_neighbors) {
  const std::vector<VertexId> nbrs(stored_neighbors.begin(), stored_neighbors.end());
  roundtrip(p, wire::PlaceVertex{next_seq_++, p, v, nbrs});
  for (const auto q : neighbour_owners(stored_neighbors, p)) roundtrip(q, wire::PlaceVertex{next_seq_++, p, v, nbrs});
}

void DistributedDispatcher::before_delete_vertex(PartitionId owner, VertexId v) {
  roundtrip(owner, wire::DeleteVertex{next_seq_++, v});
  const auto& adj = summary_.adjacency(v);
  const std::vector<VertexId> nbrs(adj.begin(), adj.end());
  for (const auto q : neighbour_owners(nbrs, owner)) roundtrip(q, wire::DeleteVertex{next_seq_++, v});
}

void DistributedDispatcher::before_delete_edge(Edge e) {
  std::set<PartitionId> owners;
  for (const auto x : {e.src, e.dst}) {
    if (const auto q = summary_.placement(x)) owners.insert(*q);
  }
  for (const auto q : owners) roundtrip(q, wire::DeleteEdge{next_seq_++, e.src, e.dst});
}

void DistributedDispatcher::before_migration(const MigrationPlan& plan, const PartitionSummary& summary) {
  migrate(plan, summary);
}

void DistributedDispatcher::migrate(const MigrationPlan& plan, const PartitionSummary& summary) {
  if (!plan.vertices.empty()) {
    wire::MigrateBatch batch{next_seq_++, plan.source, {}};
    for (const auto v : plan.vertices) {
      const auto& adj = summary.adjacency(v);
      batch.entries.push_back({v, {adj.begin(), adj.end()}});
    }
    roundtrip(plan.destination, batch);
  }
  roundtrip(plan.source, wire::Shutdown{next_seq_++});
  connections_.erase(plan.source);
  registry_.erase(plan.source);
}

std::map<PartitionId, std::map<VertexId, std::set<VertexId>>> DistributedDispatcher::collect_shards() {
  std::map<PartitionId, std::map<VertexId, std::set<VertexId>>> out;
  for (const auto& [p, _] : registry_) {
    const auto reply = roundtrip(p, wire::Snapshot{next_seq_++});
    const auto* r = std::get_if<wire::SnapshotReply>(&reply);
    if (r == nullptr) throw TransportError("expected SnapshotReply from partition " + std::to_string(p.value));
    auto& shard = out[p];
    for (const auto& e : r->entries) shard[e.vertex] = {e.neighbors.begin(), e.neighbors.end()};
  }
  return out;
}

void DistributedDispatcher::shutdown_all() {
  for (const auto& [p, _] : connections_) roundtrip(p, wire::Shutdown{next_seq_++});
  connections_.clear();
  registry_.clear();
}

void migrate_over_wire(DistributedDispatcher& d, const MigrationPlan& plan, const PartitionSummary& summary) {
  d.migrate(plan, summary);
}

std::string compare_shards(const PartitionSummary& summary,
                           const std::map<PartitionId, std::map<VertexId, std::set<VertexId>>>& shards) {
  std::ostringstream diff;
  const auto live = summary.live_partitions();
  if (live.size() != shards.size()) {
    diff << "summary has " << live.size() << " live partitions, workers report " << shards.size();
    return diff.str();
  }
  for (const auto p : live) {
    const auto it = shards.find(p);
    if (it == shards.end()) {
      diff << "no shard for partition " << p.value;
      return diff.str();
    }
    const auto& shard = it->second;
    const auto& expected = summary.partition_adjacency(p);
    if (expected.size() != shard.size()) {
      diff << "partition " << p.value << ": summary holds " << expected.size() << " vertices, shard holds "
           << shard.size();
      return diff.str();
    }
    for (const auto& [v, nbrs] : expected) {
      const auto s = shard.find(v);
      if (s == shard.end()) {
        diff << "partition " << p.value << ": vertex " << v.value << " missing from shard";
        return diff.str();
      }
      if (s->second != nbrs) {
        diff << "partition " << p.value << ": adjacency of vertex " << v.value << " differs";
        return diff.str();
      }
    }
  }
  return {};
}

}  // namespace sdp::net
