#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sdp/engine.hpp"
#include "sdp/graph_io.hpp"
#include "sdp/metrics.hpp"

namespace sdp {

/// Interval experiment: each interval adds add_percent of the dataset's vertices, then
/// deletes delete_vertex_percent of them (and delete_edge_percent of its edges).
struct ScenarioConfig {
  double add_percent{25.0};
  double delete_vertex_percent{5.0};
  std::uint32_t intervals{4};
  double delete_edge_percent{0.0};
  std::uint64_t order_seed{0};
  std::uint64_t delete_seed{0};
  std::uint64_t delete_edge_seed{0};
  /// Vertices added in the current interval are not eligible for that interval's deletions.
  bool delete_stable_only{false};
  /// Stream in file order instead of the seeded permutation.
  bool file_order{false};

  /// Sub-seeds derived from one root seed.
  static ScenarioConfig seeded(std::uint64_t root);
  /// Single interval streaming every vertex once, nothing deleted.
  static ScenarioConfig add_only(std::uint64_t root);

  void validate() const;
};

struct Schedule {
  std::vector<GraphEvent> events;
  /// Event counts at which each interval ends (strictly increasing).
  std::vector<std::uint64_t> interval_marks;
  /// Event counts at which each interval's add phase ends.
  std::vector<std::uint64_t> add_marks;

  bool operator==(const Schedule&) const = default;
};

/// floor(total * percent / 100), robust to binary rounding of the percentage.
std::uint64_t percent_count(std::uint64_t total, double percent);

/// Throws ScheduleError when an interval would delete more vertices (or edges) than are live.
Schedule build_schedule(const Dataset& d, const ScenarioConfig& cfg);

/// Structural validity: contiguous seqs, marks increasing and in range, deletions only of
/// live vertices. Throws ScheduleError.
void check_schedule(const Schedule& s);

struct ReplayHooks {
  /// Called after the add phase of interval i (1-based) has been delivered.
  std::function<void(std::uint32_t)> on_adds_done;
  /// Called after interval i (1-based) has been delivered.
  std::function<void(std::uint32_t)> on_interval;
};

struct ReplayReport {
  std::uint64_t delivered{0};
  std::uint32_t intervals_fired{0};
};

/// Thrown when the sink fails; carries how far delivery got.
class ReplayAborted : public Error {
 public:
  ReplayAborted(const std::string& what, std::uint64_t delivered, std::optional<std::uint64_t> last_seq)
      : Error(what), delivered_(delivered), last_seq_(last_seq) {}
  std::uint64_t delivered() const { return delivered_; }
  std::optional<std::uint64_t> last_seq() const { return last_seq_; }

 private:
  std::uint64_t delivered_;
  std::optional<std::uint64_t> last_seq_;
};

/// Delivers events to `sink` strictly in seq order. `producers` threads stage events
/// concurrently into a bounded reorder window; the calling thread is the only one that
/// invokes `sink` and the hooks.
ReplayReport replay(const Schedule& schedule, const std::function<void(const GraphEvent&)>& sink,
                    const ReplayHooks& hooks = {}, unsigned producers = 2);

/// JSON-lines trace, one event or mark per line.
void write_trace(const Schedule& s, std::ostream& out);
void write_trace(const Schedule& s, const std::filesystem::path& path);
Schedule read_trace(std::istream& in);
Schedule read_trace(const std::filesystem::path& path);

struct StreamHooks {
  std::function<void(const Engine&, std::uint32_t)> after_adds;
  std::function<void(const Engine&, const MetricsRecord&)> after_interval;
};

struct StreamResult {
  std::vector<MetricsRecord> series;
  ReplayReport report;
  std::size_t migrations{0};
};

/// Feeds the schedule through the engine. At each interval mark runs scale-in, then
/// captures a metrics record; a final record is captured if events follow the last mark.
StreamResult run_stream(Engine& engine, const Schedule& schedule, const StreamHooks& hooks = {},
                        unsigned producers = 2);

}  // namespace sdp
