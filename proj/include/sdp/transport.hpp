#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>

#include "sdp/engine.hpp"
#include "sdp/wire.hpp"

namespace sdp::net {

/// The peer closed the connection.
class ConnectionClosed : public TransportError {
 public:
  using TransportError::TransportError;
};

struct Endpoint {
  std::string host{"127.0.0.1"};
  std::uint16_t port{0};

  /// "host:port"; a bare port means 127.0.0.1.
  static Endpoint parse(const std::string& text);
  std::string str() const;
  bool operator==(const Endpoint&) const = default;
};

/// Connected TCP stream socket (owning).
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  static Socket connect(const Endpoint& ep, std::chrono::milliseconds timeout);

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }
  void close();

  /// Receive timeout for read_frame; zero disables it.
  void set_timeout(std::chrono::milliseconds t);

  void write_frame(const wire::Message& m);
  /// nullopt on timeout. Throws TransportError on EOF or malformed input.
  std::optional<wire::Message> read_frame();

 private:
  int fd_{-1};
};

class Listener {
 public:
  /// Binds and listens; port 0 picks an ephemeral port.
  explicit Listener(const Endpoint& ep);
  Listener(Listener&&) noexcept;
  Listener& operator=(Listener&&) = delete;
  ~Listener();

  std::uint16_t port() const { return port_; }
  Socket accept();

 private:
  int fd_{-1};
  std::uint16_t port_{0};
};

/// Worker-side shard: the vertices of one partition with their stored adjacency.
class ShardStore {
 public:
  /// Applies a master message and returns the reply (Ack or SnapshotReply).
  /// Redelivered seqs are acknowledged with AckStatus::Duplicate and not re-applied.
  wire::Message apply(const wire::Message& m);

  std::optional<PartitionId> partition() const { return partition_; }
  const std::map<VertexId, std::set<VertexId>>& contents() const { return shard_; }
  std::uint64_t applied_count() const { return applied_.size(); }
  bool shutdown_requested() const { return shutdown_; }

 private:
  wire::Ack ack(std::uint64_t seq, wire::AckStatus status) const;

  std::optional<PartitionId> partition_;
  std::map<VertexId, std::set<VertexId>> shard_;
  std::unordered_set<std::uint64_t> applied_;
  bool shutdown_{false};
};

/// Serves one master connection at a time until Shutdown arrives or the master hangs up.
class WorkerServer {
 public:
  explicit WorkerServer(const Endpoint& listen);
  std::uint16_t port() const { return listener_.port(); }
  /// Blocks. Returns after Shutdown or when the master disconnects.
  void serve();
  const ShardStore& store() const { return store_; }

 private:
  Listener listener_;
  ShardStore store_;
};

/// Worker entry point used by the CLI. `on_listening` receives the bound port.
void serve_worker(const Endpoint& listen, const std::function<void(std::uint16_t)>& on_listening = {});

struct DispatchOptions {
  std::chrono::milliseconds timeout{2000};
  unsigned retries{3};
  /// Fault injection: deliver every message twice (exercises idempotent apply).
  bool duplicate_delivery{false};
};

/// Provides the endpoint of a fresh worker for a new partition.
using WorkerProvider = std::function<Endpoint(PartitionId)>;

struct WorkerInfo {
  Endpoint endpoint;
  std::chrono::steady_clock::time_point last_ack;
};

/// Master side: mirrors every metadata mutation of the engine onto worker shards,
/// waiting for the Ack before the engine applies it.
class DistributedDispatcher final : public PlacementObserver {
 public:
  DistributedDispatcher(const PartitionSummary& summary, WorkerProvider provider, DispatchOptions opts = {});
  ~DistributedDispatcher() override;

  /// Registers workers for partitions that already exist in the summary.
  void attach_existing();

  void on_partition_added(PartitionId p) override;
  void before_place(PartitionId p, VertexId v, std::span<const VertexId> stored_neighbors) override;
  void before_delete_vertex(PartitionId owner, VertexId v) override;
  void before_delete_edge(Edge e) override;
  void before_migration(const MigrationPlan& plan, const PartitionSummary& summary) override;

  /// Current shard contents of every registered worker.
  std::map<PartitionId, std::map<VertexId, std::set<VertexId>>> collect_shards();
  /// MigrateBatch to the destination, then Shutdown to the source, which leaves the registry.
  void migrate(const MigrationPlan& plan, const PartitionSummary& summary);
  /// Sends Shutdown to every worker and closes the connections.
  void shutdown_all();

  const std::map<PartitionId, WorkerInfo>& registry() const { return registry_; }
  std::uint64_t messages_sent() const { return next_seq_; }
  std::uint64_t retransmissions() const { return retransmissions_; }

 private:
  wire::Message roundtrip(PartitionId p, const wire::Message& m);
  void hello(PartitionId p);
  std::set<PartitionId> neighbour_owners(std::span<const VertexId> vs, PartitionId except) const;

  const PartitionSummary& summary_;
  WorkerProvider provider_;
  DispatchOptions opts_;
  std::map<PartitionId, WorkerInfo> registry_;
  std::map<PartitionId, Socket> connections_;
  std::uint64_t next_seq_{0};
  std::uint64_t retransmissions_{0};
};

/// Same as d.migrate(plan, summary).
void migrate_over_wire(DistributedDispatcher& d, const MigrationPlan& plan, const PartitionSummary& summary);

/// Empty string when the shards match the summary partition by partition; otherwise a
/// description of the first difference.
std::string compare_shards(const PartitionSummary& summary,
                           const std::map<PartitionId, std::map<VertexId, std::set<VertexId>>>& shards);

}  // namespace sdp::net
