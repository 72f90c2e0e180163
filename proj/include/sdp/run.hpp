#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdp/stream.hpp"

namespace sdp {

enum class RunMode : std::uint8_t { InProc, Distributed };

RunMode parse_run_mode(const std::string& name);
const char* to_string(RunMode mode);

/// Everything that determines a run. All randomness derives from `seed`.
struct RunSpec {
  /// File path, or "synthetic:<name>" with name in {3elt, grqc, two-cliques}.
  std::string dataset;
  GraphFormat format{GraphFormat::Snap};
  std::optional<std::filesystem::path> manifest;
  /// Replays this JSON-lines trace instead of building a schedule from the dataset.
  std::optional<std::filesystem::path> trace;

  Algorithm algo{Algorithm::Sdp};
  std::uint32_t intervals{4};
  double add_percent{25.0};
  double delete_percent{5.0};
  double delete_edge_percent{0.0};
  bool delete_stable_only{false};

  std::uint64_t maxcap{0};  ///< 0: ceil(1.2 |E| / k_target), |E| from the manifest or the dataset
  std::uint32_t k_target{4};
  double tolerance{20.0};
  double dest_param{5.0};
  GateDirection gate_direction{GateDirection::Prose};
  bool gate_enabled{true};
  /// Fixed partition count for baselines; 0 means k_target.
  std::uint32_t partitions{0};
  std::uint64_t seed{1};
  bool audit{false};

  RunMode mode{RunMode::InProc};
  std::uint32_t workers{4};  ///< upper bound on concurrently live workers
  /// Worker binary for distributed runs; empty runs workers as in-process threads.
  std::filesystem::path worker_executable;

  std::optional<std::filesystem::path> out;

  void validate() const;
};

/// Dataset named by a spec (file or synthetic generator).
Dataset load_dataset(const std::string& source, GraphFormat format);

struct RunOutcome {
  std::vector<MetricsRecord> series;
  std::vector<ScalingEvent> scaling;
  std::map<VertexId, PartitionId> placement;
  /// Distributed mode: union of worker shards, vertex -> partition.
  std::optional<std::map<VertexId, PartitionId>> shard_placement;
  /// Distributed mode: empty when every shard matches the master summary.
  std::string shard_diff;
  std::size_t final_partitions{0};
  std::size_t migrations{0};
  std::uint64_t warnings{0};
  std::uint64_t messages{0};
  std::uint64_t edge_count{0};  ///< dataset |E| (0 when replaying a trace without one)
  std::uint64_t maxcap{0};
};

/// Shared inputs of several runs over the same trace.
struct PreparedRun {
  Schedule schedule;
  std::optional<Dataset> dataset;
  std::uint64_t dataset_digest{0};
  std::uint64_t maxcap{0};
  std::uint64_t total_adds{0};
};

PreparedRun prepare(const RunSpec& spec);

/// Executes one run. `fixed_k` overrides the partition count used by baselines.
/// Writes manifest.txt, metrics.csv, scaling.csv and assignments.csv (audit.csv with
/// --audit) when spec.out is set.
RunOutcome execute(const RunSpec& spec, const PreparedRun& prepared, std::optional<std::uint32_t> fixed_k = {});

RunOutcome run(const RunSpec& spec);

struct CompareOutcome {
  std::map<std::string, RunOutcome> runs;
  std::vector<LabeledRecord> merged;
};

/// Runs every algorithm on the identical trace. SDP runs first (when listed) and fixes
/// the partition count of the baselines to its final k. Writes compare.csv and one
/// subdirectory per algorithm under spec.out.
CompareOutcome compare(const RunSpec& spec, const std::vector<Algorithm>& algos);

/// Per-interval table of edge-cut ratio and load imbalance per algorithm, with deltas
/// relative to the first algorithm.
std::string format_report(const std::vector<LabeledRecord>& rows);

}  // namespace sdp
