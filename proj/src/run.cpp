#include "sdp/run.hpp"

#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <list>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "sdp/synthetic.hpp"
#include "sdp/transport.hpp"

extern char** environ;

namespace sdp {

RunMode parse_run_mode(const std::string& name) {
  if (name == "inproc") return RunMode::InProc;
  if (name == "distributed") return RunMode::Distributed;
  throw ConfigError("unknown mode '" + name + "' (expected inproc or distributed)");
}

const char* to_string(RunMode mode) { return mode == RunMode::InProc ? "inproc" : "distributed"; }

void RunSpec::validate() const {
  if (dataset.empty() && !trace) throw ConfigError("a dataset or a trace is required");
  if (k_target == 0) throw ConfigError("--k-target must be positive");
  if (mode == RunMode::Distributed && workers == 0) throw ConfigError("distributed mode needs at least one worker");
  if (!trace) {
    ScenarioConfig sc;
    sc.add_percent = add_percent;
    sc.delete_vertex_percent = delete_percent;
    sc.delete_edge_percent = delete_edge_percent;
    sc.intervals = intervals;
    sc.validate();
  }
  if (algo == Algorithm::Sdp && maxcap > 0) {
    CapacityConfig{maxcap, tolerance, dest_param}.validate();
  }
}

Dataset load_dataset(const std::string& source, GraphFormat format) {
  constexpr std::string_view prefix = "synthetic:";
  if (source.starts_with(prefix)) {
    const auto name = source.substr(prefix.size());
    if (name == "3elt") return synthetic::mesh_3elt_like();
    if (name == "grqc") return synthetic::collaboration_grqc_like();
    if (name == "two-cliques") return synthetic::two_cliques(500, 10, 11);
    throw ConfigError("unknown synthetic dataset '" + name + "' (expected 3elt, grqc or two-cliques)");
  }
  if (!std::filesystem::exists(source)) throw Error("dataset '" + source + "' does not exist");
  return parse_edge_list(source, format);
}

namespace {

std::uint64_t default_maxcap(std::uint64_t edges, std::uint32_t k_target) {
  return static_cast<std::uint64_t>(std::ceil(1.2 * static_cast<double>(edges) / k_target));
}

// Local worker processes ("sdp worker") or threads, handed out one per new partition.
class WorkerPool {
 public:
  WorkerPool(std::filesystem::path exe, std::uint32_t limit) : exe_(std::move(exe)), limit_(limit) {}
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    for (const auto pid : pids_) reap(pid);
  }

  net::Endpoint spawn(std::size_t live) {
    if (live >= limit_) {
      throw TransportError("worker limit of " + std::to_string(limit_) + " reached; raise --workers or --maxcap");
    }
    return exe_.empty() ? spawn_thread() : spawn_process();
  }

 private:
  net::Endpoint spawn_thread() {
    auto server = std::make_shared<net::WorkerServer>(net::Endpoint{"127.0.0.1", 0});
    const auto port = server->port();
    threads_.emplace_back([server] {
      try {
        server->serve();
      } catch (const std::exception&) {
      }
    });
    return {"127.0.0.1", port};
  }

  net::Endpoint spawn_process() {
    int fds[2];
    if (::pipe(fds) != 0) throw TransportError("pipe failed");
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, fds[0]);
    posix_spawn_file_actions_addclose(&actions, fds[1]);
    const std::string exe = exe_.string();
    std::vector<std::string> args{exe, "worker", "--listen", "127.0.0.1:0"};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    const int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(fds[1]);
    if (rc != 0) {
      ::close(fds[0]);
      throw TransportError("cannot start worker '" + exe + "'");
    }
    pids_.push_back(pid);

    // The worker announces "listening <port>" once bound.
    std::string line;
    pollfd pfd{fds[0], POLLIN, 0};
    char c = 0;
    while (line.find('\n') == std::string::npos) {
      if (::poll(&pfd, 1, 5000) <= 0 || ::read(fds[0], &c, 1) != 1) {
        ::close(fds[0]);
        throw TransportError("worker '" + exe + "' did not announce its port");
      }
      line.push_back(c);
    }
    ::close(fds[0]);
    unsigned port = 0;
    if (std::sscanf(line.c_str(), "listening %u", &port) != 1) {
      throw TransportError("unexpected worker greeting '" + line + "'");
    }
    return {"127.0.0.1", static_cast<std::uint16_t>(port)};
  }

  static void reap(pid_t pid) {
    for (int i = 0; i < 200; ++i) {
      if (::waitpid(pid, nullptr, WNOHANG) != 0) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ::kill(pid, SIGTERM);
    ::waitpid(pid, nullptr, 0);
  }

  std::filesystem::path exe_;
  std::uint32_t limit_;
  std::vector<pid_t> pids_;
  std::list<std::jthread> threads_;
};

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

void write_run_manifest(std::ostream& out, const RunSpec& spec, const PreparedRun& prep, const EngineConfig& cfg) {
  out << "# sdp run manifest\n";
  out << "version = " << SDP_VERSION << '\n';
  out << "dataset = " << spec.dataset << '\n';
  out << "format = " << to_string(spec.format) << '\n';
  out << "dataset_digest = " << std::hex << std::setw(16) << std::setfill('0') << prep.dataset_digest << std::dec
      << std::setfill(' ') << '\n';
  if (prep.dataset) {
    out << "vertices = " << prep.dataset->vertex_count() << '\n';
    out << "edges = " << prep.dataset->edge_count << '\n';
  }
  if (spec.trace) out << "trace = " << spec.trace->string() << '\n';
  out << "events = " << prep.schedule.events.size() << '\n';
  out << "algo = " << to_string(cfg.algorithm) << '\n';
  out << "mode = " << to_string(spec.mode) << '\n';
  if (spec.mode == RunMode::Distributed) out << "workers = " << spec.workers << '\n';
  out << "seed = " << spec.seed << '\n';
  out << "seed_order = " << derive_seed(spec.seed, "order") << '\n';
  out << "seed_delete = " << derive_seed(spec.seed, "delete") << '\n';
  out << "seed_delete_edge = " << derive_seed(spec.seed, "delete-edge") << '\n';
  out << "seed_assign = " << cfg.rng_seed << '\n';
  out << "intervals = " << spec.intervals << '\n';
  out << "add_percent = " << spec.add_percent << '\n';
  out << "delete_percent = " << spec.delete_percent << '\n';
  out << "delete_edge_percent = " << spec.delete_edge_percent << '\n';
  out << "delete_stable_only = " << (spec.delete_stable_only ? "true" : "false") << '\n';
  out << "maxcap = " << cfg.scaling.maxcap << '\n';
  out << "k_target = " << spec.k_target << '\n';
  out << "tolerance = " << cfg.scaling.tolerance_parameter << '\n';
  out << "dest_param = " << cfg.scaling.dest_param << '\n';
  out << "gate = " << (cfg.gate_enabled ? "on" : "off") << '\n';
  out << "gate_direction = " << to_string(cfg.gate_direction) << '\n';
  out << "initial_partitions = " << cfg.initial_partitions << '\n';
  if (cfg.algorithm == Algorithm::Ldg) out << "ldg_capacity = " << cfg.ldg_capacity << '\n';
  out << "audit = " << (cfg.audit ? "true" : "false") << '\n';
}

}  // namespace

PreparedRun prepare(const RunSpec& spec) {
  spec.validate();
  PreparedRun prep;
  std::optional<DatasetManifest> manifest;
  if (spec.manifest) {
    manifest = parse_manifest(*spec.manifest);
  } else if (!spec.dataset.empty() && std::filesystem::is_regular_file(spec.dataset + ".manifest")) {
    manifest = parse_manifest(spec.dataset + ".manifest");
  }

  if (!spec.dataset.empty()) {
    prep.dataset = load_dataset(spec.dataset, spec.format);
    if (manifest) validate_against_manifest(*prep.dataset, *manifest);
    if (std::filesystem::is_regular_file(spec.dataset)) prep.dataset_digest = file_digest(spec.dataset);
    else prep.dataset_digest = fnv1a64(spec.dataset);
  }

  if (spec.trace) {
    prep.schedule = read_trace(*spec.trace);
  } else {
    auto sc = ScenarioConfig::seeded(spec.seed);
    sc.add_percent = spec.add_percent;
    sc.delete_vertex_percent = spec.delete_percent;
    sc.delete_edge_percent = spec.delete_edge_percent;
    sc.intervals = spec.intervals;
    sc.delete_stable_only = spec.delete_stable_only;
    prep.schedule = build_schedule(*prep.dataset, sc);
  }
  for (const auto& ev : prep.schedule.events) prep.total_adds += ev.kind == EventKind::AddVertex ? 1 : 0;

  if (spec.maxcap > 0) {
    prep.maxcap = spec.maxcap;
  } else if (manifest && manifest->edges) {
    prep.maxcap = default_maxcap(*manifest->edges, spec.k_target);
  } else if (prep.dataset) {
    prep.maxcap = default_maxcap(prep.dataset->edge_count, spec.k_target);
  } else if (spec.algo == Algorithm::Sdp) {
    throw ConfigError("--maxcap is required when replaying a trace without --dataset or --manifest");
  }
  return prep;
}

RunOutcome execute(const RunSpec& spec, const PreparedRun& prep, std::optional<std::uint32_t> fixed_k) {
  EngineConfig cfg;
  cfg.algorithm = spec.algo;
  cfg.scaling = {prep.maxcap, spec.tolerance, spec.dest_param};
  cfg.gate_direction = spec.gate_direction;
  cfg.gate_enabled = spec.gate_enabled;
  cfg.rng_seed = derive_seed(spec.seed, "assign");
  cfg.audit = spec.audit;
  if (spec.algo != Algorithm::Sdp) {
    const std::uint32_t k = fixed_k.value_or(spec.partitions > 0 ? spec.partitions : spec.k_target);
    cfg.autoscale = false;
    cfg.initial_partitions = k;
    cfg.ldg_capacity = std::max<std::uint64_t>(1, (prep.total_adds + k - 1) / k);
  }

  Engine engine(cfg);
  RunOutcome outcome;
  outcome.maxcap = prep.maxcap;
  outcome.edge_count = prep.dataset ? prep.dataset->edge_count : 0;

  std::unique_ptr<WorkerPool> pool;
  std::unique_ptr<net::DistributedDispatcher> dispatcher;
  if (spec.mode == RunMode::Distributed) {
    pool = std::make_unique<WorkerPool>(spec.worker_executable, spec.workers);
    auto* d = &dispatcher;
    dispatcher = std::make_unique<net::DistributedDispatcher>(
        engine.summary(), [&pool, d](PartitionId) { return pool->spawn((*d)->registry().size()); });
    dispatcher->attach_existing();
    engine.set_observer(dispatcher.get());
  }

  const auto result = run_stream(engine, prep.schedule);
  outcome.series = result.series;
  outcome.migrations = result.migrations;
  outcome.scaling = engine.scaling_log();
  outcome.final_partitions = engine.partition_count();
  outcome.warnings = engine.warn_count();
  for (const auto p : engine.summary().live_partitions()) {
    for (const auto v : engine.summary().vertices(p)) outcome.placement.emplace(v, p);
  }

  if (dispatcher) {
    const auto shards = dispatcher->collect_shards();
    outcome.shard_diff = net::compare_shards(engine.summary(), shards);
    std::map<VertexId, PartitionId> union_map;
    for (const auto& [p, shard] : shards) {
      for (const auto& [v, _] : shard) {
        if (!union_map.emplace(v, p).second) {
          outcome.shard_diff = "vertex " + std::to_string(v.value) + " is held by more than one worker";
        }
      }
    }
    outcome.shard_placement = std::move(union_map);
    outcome.messages = dispatcher->messages_sent();
    dispatcher->shutdown_all();
    engine.set_observer(nullptr);
    dispatcher.reset();
    pool.reset();
    if (!outcome.shard_diff.empty()) throw InvariantViolation("worker shards diverged: " + outcome.shard_diff);
  }

  if (spec.out) {
    const auto& dir = *spec.out;
    std::filesystem::create_directories(dir);
    write_file(dir / "manifest.txt", [&](std::ostream& o) { write_run_manifest(o, spec, prep, cfg); });
    write_csv(outcome.series, dir / "metrics.csv");
    write_file(dir / "scaling.csv", [&](std::ostream& o) { write_scaling_log(outcome.scaling, o); });
    write_file(dir / "assignments.csv", [&](std::ostream& o) { write_assignment_snapshot(engine.summary(), o); });
    if (spec.audit) write_file(dir / "audit.csv", [&](std::ostream& o) { write_audit_log(engine.audit_log(), o); });
  }
  return outcome;
}

RunOutcome run(const RunSpec& spec) { return execute(spec, prepare(spec)); }

CompareOutcome compare(const RunSpec& spec, const std::vector<Algorithm>& algos) {
  if (algos.empty()) throw ConfigError("nothing to compare");
  std::vector<Algorithm> order;
  std::set<Algorithm> seen;
  for (const auto a : algos) {
    if (seen.insert(a).second) order.push_back(a);
  }
  std::stable_partition(order.begin(), order.end(), [](Algorithm a) { return a == Algorithm::Sdp; });

  auto base = spec;
  base.algo = order.front();
  const auto prep = prepare(base);

  CompareOutcome outcome;
  std::optional<std::uint32_t> fixed_k;
  for (const auto a : order) {
    auto s = spec;
    s.algo = a;
    if (spec.out) s.out = *spec.out / to_string(a);
    auto r = execute(s, prep, fixed_k);
    if (a == Algorithm::Sdp && spec.partitions == 0) fixed_k = static_cast<std::uint32_t>(r.final_partitions);
    outcome.runs.emplace(to_string(a), std::move(r));
  }
  for (const auto a : algos) {
    if (!seen.erase(a)) continue;
    for (const auto& rec : outcome.runs.at(to_string(a)).series) outcome.merged.push_back({to_string(a), rec});
  }
  if (spec.out) {
    write_file(*spec.out / "compare.csv", [&](std::ostream& o) { write_merged_csv(outcome.merged, o); });
  }
  return outcome;
}

std::string format_report(const std::vector<LabeledRecord>& rows) {
  std::vector<std::string> algos;
  std::map<std::pair<std::uint32_t, std::uint64_t>, std::map<std::string, MetricsRecord>> table;
  for (const auto& r : rows) {
    const auto label = r.algo.empty() ? std::string("run") : r.algo;
    if (std::find(algos.begin(), algos.end(), label) == algos.end()) algos.push_back(label);
    table[{r.record.interval, r.record.seq}][label] = r.record;
  }
  std::ostringstream out;
  out << std::left << std::setw(9) << "interval" << std::setw(9) << "seq";
  for (const auto& a : algos) {
    out << std::setw(12) << (a + ".cut") << std::setw(14) << (a + ".imb");
  }
  for (std::size_t i = 1; i < algos.size(); ++i) {
    out << std::setw(18) << ("d.cut(" + algos[i] + ")") << std::setw(18) << ("d.imb(" + algos[i] + ")");
  }
  out << '\n';
  char buf[64];
  auto cell = [&](double x, const char* f, int width) {
    std::snprintf(buf, sizeof buf, f, x);
    out << std::setw(width) << buf;
  };
  for (const auto& [key, by_algo] : table) {
    out << std::setw(9) << key.first << std::setw(9) << key.second;
    for (const auto& a : algos) {
      const auto it = by_algo.find(a);
      if (it == by_algo.end()) {
        out << std::setw(12) << "-" << std::setw(14) << "-";
        continue;
      }
      cell(it->second.edge_cut_ratio, "%.4f", 12);
      cell(it->second.load_imbalance, "%.2f", 14);
    }
    const auto first = by_algo.find(algos.front());
    for (std::size_t i = 1; i < algos.size(); ++i) {
      const auto it = by_algo.find(algos[i]);
      if (first == by_algo.end() || it == by_algo.end()) {
        out << std::setw(18) << "-" << std::setw(18) << "-";
        continue;
      }
      cell(it->second.edge_cut_ratio - first->second.edge_cut_ratio, "%+.4f", 18);
      cell(it->second.load_imbalance - first->second.load_imbalance, "%+.2f", 18);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sdp
