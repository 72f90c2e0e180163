#include "sdp/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sdp {
namespace {

std::string fmt(double x, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

void write_row(std::ostream& out, const MetricsRecord& r, const std::string& algo) {
  if (!algo.empty()) out << algo << ',';
  out << r.seq << ',' << r.interval << ',' << fmt(r.edge_cut_ratio, "%.9f") << ',' << fmt(r.load_imbalance, "%.6f")
      << ',' << r.partitions << ',' << r.live_vertices << ',' << r.live_edges << ',' << fmt(r.elapsed_ms, "%.3f")
      << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

double edge_cut_ratio(const PartitionSummary& s) {
  const auto live = s.live_edge_count();
  if (live == 0) return 0.0;
  return static_cast<double>(s.cut_edge_count()) / static_cast<double>(live);
}

double load_imbalance(const StatsMap& stats) {
  if (stats.size() < 2) return 0.0;
  double sum = 0.0;
  for (const auto& [_, st] : stats) sum += static_cast<double>(st.load());
  const double mean = sum / static_cast<double>(stats.size());
  double sq = 0.0;
  for (const auto& [_, st] : stats) {
    const double d = static_cast<double>(st.load()) - mean;
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(stats.size()));
}

double load_imbalance(const PartitionSummary& s) { return load_imbalance(s.stats()); }

MetricsRecord capture(const PartitionSummary& s, std::uint64_t seq, std::uint32_t interval,
                      MetricsClock::time_point run_start) {
  MetricsRecord r;
  r.seq = seq;
  r.interval = interval;
  r.edge_cut_ratio = edge_cut_ratio(s);
  r.load_imbalance = load_imbalance(s);
  r.partitions = s.partition_count();
  r.live_vertices = s.live_vertex_count();
  r.live_edges = s.live_edge_count();
  r.elapsed_ms = std::chrono::duration<double, std::milli>(MetricsClock::now() - run_start).count();
  return r;
}

void write_csv(std::span<const MetricsRecord> series, std::ostream& out, const std::string& algo) {
  if (!algo.empty()) out << "algo,";
  out << kMetricsHeader << '\n';
  for (const auto& r : series) write_row(out, r, algo);
}

void write_csv(std::span<const MetricsRecord> series, const std::filesystem::path& path, const std::string& algo) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(series, out, algo);
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

void write_merged_csv(std::span<const LabeledRecord> rows, std::ostream& out) {
  out << "algo," << kMetricsHeader << '\n';
  for (const auto& row : rows) write_row(out, row.record, row.algo);
}

std::vector<LabeledRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("metrics file is empty", 1);
  bool labeled = false;
  if (line == std::string("algo,") + kMetricsHeader) {
    labeled = true;
  } else if (line != kMetricsHeader) {
    throw ParseError("unexpected metrics header '" + line + "'", 1);
  }
  const std::size_t width = labeled ? 9 : 8;
  std::vector<LabeledRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != width) throw ParseError("expected " + std::to_string(width) + " columns", lineno);
    const std::size_t o = labeled ? 1 : 0;
    LabeledRecord row;
    try {
      if (labeled) row.algo = c[0];
      auto& r = row.record;
      r.seq = std::stoull(c[o]);
      r.interval = static_cast<std::uint32_t>(std::stoul(c[o + 1]));
      r.edge_cut_ratio = std::stod(c[o + 2]);
      r.load_imbalance = std::stod(c[o + 3]);
      r.partitions = std::stoull(c[o + 4]);
      r.live_vertices = std::stoull(c[o + 5]);
      r.live_edges = std::stoull(c[o + 6]);
      r.elapsed_ms = std::stod(c[o + 7]);
    } catch (const std::logic_error&) {
      throw ParseError("malformed metrics row", lineno);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LabeledRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_csv(in);
}

}  // namespace sdp
