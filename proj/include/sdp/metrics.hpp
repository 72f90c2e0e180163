#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sdp/partition_state.hpp"

namespace sdp {

struct MetricsRecord {
  std::uint64_t seq{0};  ///< events processed when the record was taken
  std::uint32_t interval{0};
  double edge_cut_ratio{0.0};
  double load_imbalance{0.0};
  std::uint64_t partitions{0};
  std::uint64_t live_vertices{0};
  std::uint64_t live_edges{0};
  double elapsed_ms{0.0};

  bool operator==(const MetricsRecord&) const = default;
};

/// Cut edges over live edges; 0 for an edgeless state.
double edge_cut_ratio(const PartitionSummary& s);

/// Population standard deviation of partition loads; 0 for k <= 1.
double load_imbalance(const StatsMap& stats);
double load_imbalance(const PartitionSummary& s);

using MetricsClock = std::chrono::steady_clock;

MetricsRecord capture(const PartitionSummary& s, std::uint64_t seq, std::uint32_t interval,
                      MetricsClock::time_point run_start);

inline constexpr const char* kMetricsHeader =
    "seq,interval,edge_cut_ratio,load_imbalance,partitions,live_vertices,live_edges,elapsed_ms";

/// One CSV row per record under kMetricsHeader. A non-empty `algo` prepends an algo column.
void write_csv(std::span<const MetricsRecord> series, std::ostream& out, const std::string& algo = {});
/// Throws Error when the file cannot be written.
void write_csv(std::span<const MetricsRecord> series, const std::filesystem::path& path,
               const std::string& algo = {});

struct LabeledRecord {
  std::string algo;  ///< empty for single-algorithm files
  MetricsRecord record;
};

/// Reads a file written by write_csv (with or without the algo column).
std::vector<LabeledRecord> read_csv(std::istream& in);
std::vector<LabeledRecord> read_csv(const std::filesystem::path& path);

/// Writes the merged comparison file: header with a leading algo column, rows grouped by algo.
void write_merged_csv(std::span<const LabeledRecord> rows, std::ostream& out);

}  // namespace sdp
