#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "../support/fuzz.hpp"
#include "../support/oracle.hpp"
#include "sdp/assigner.hpp"
#include "sdp/metrics.hpp"

using namespace sdp;

namespace {

StatsMap loads(std::initializer_list<std::uint64_t> xs) {
  StatsMap out;
  std::uint32_t p = 0;
  for (const auto l : xs) out.emplace(PartitionId{p++}, PartitionStats{l, 0, 0});
  return out;
}

}  // namespace

TEST(LoadImbalance, PopulationStd) {
  EXPECT_DOUBLE_EQ(load_imbalance(loads({10, 4})), 3.0);
  EXPECT_DOUBLE_EQ(load_imbalance(loads({5})), 0.0);
  EXPECT_DOUBLE_EQ(load_imbalance(StatsMap{}), 0.0);
  EXPECT_NEAR(load_imbalance(loads({1, 2, 3, 4})), std::sqrt(1.25), 1e-12);
}

TEST(EdgeCutRatio, EmptyAndSimple) {
  PartitionSummary s;
  EXPECT_EQ(edge_cut_ratio(s), 0.0);
  s.add_partition();
  s.add_partition();
  s.place_vertex(PartitionId{0}, VertexId{1}, {});
  s.place_vertex(PartitionId{0}, VertexId{2}, std::vector<VertexId>{VertexId{1}});
  s.place_vertex(PartitionId{1}, VertexId{3}, std::vector<VertexId>{VertexId{1}, VertexId{2}});
  EXPECT_NEAR(edge_cut_ratio(s), 2.0 / 3.0, 1e-12);
}

// Ratio and imbalance against an exhaustive scan of the model's live edges and loads.
TEST(Metrics, MatchExhaustiveScan) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PartitionSummary s;
    for (int i = 0; i < 5; ++i) s.add_partition();
    oracle::Model m;
    Rng rng(seed);
    for (const auto& ev : fuzz::mixed_stream(seed, {.events = 400})) {
      if (ev.kind == EventKind::AddVertex) {
        const PartitionId p{static_cast<std::uint32_t>(rng.below(5))};
        s.place_vertex(p, ev.vertex, ev.neighbors);
        m.add(ev.vertex, ev.neighbors, p);
      } else if (ev.kind == EventKind::DeleteVertex) {
        s.delete_vertex(ev.vertex);
        m.delete_vertex(ev.vertex);
      } else {
        s.delete_edge(ev.edge);
        m.delete_edge(ev.edge);
      }
    }
    EXPECT_NEAR(edge_cut_ratio(s), m.edge_cut_ratio(), 1e-12);
    std::vector<double> ls;
    for (const auto& [_, st] : m.stats(s.live_partitions())) ls.push_back(static_cast<double>(st.load()));
    EXPECT_NEAR(load_imbalance(s), oracle::population_std(ls), 1e-9);
    EXPECT_NEAR(load_imbalance(s), balance_snapshot(s.stats(), 1, 1).load_dev, 1e-9);
  }
}

TEST(Csv, WriteReadRoundTrip) {
  const std::vector<MetricsRecord> series{{1260, 1, 0.123456789, 12.5, 3, 840, 2000, 1.25},
                                          {2520, 2, 0.0, 0.0, 1, 1680, 4100, 2.5}};
  std::stringstream io;
  write_csv(series, io);
  const auto text = io.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kMetricsHeader);
  EXPECT_NE(text.find("\n1260,1,0.123456789,12.500000,3,840,2000,1.250\n"), std::string::npos) << text;
  const auto back = read_csv(io);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].algo, "");
  EXPECT_EQ(back[0].record, series[0]);
  EXPECT_EQ(back[1].record, series[1]);
}

TEST(Csv, AlgoColumnAndMerge) {
  const std::vector<MetricsRecord> series{{10, 1, 0.5, 1.0, 2, 5, 6, 0.0}};
  std::stringstream io;
  write_csv(series, io, "hash");
  EXPECT_EQ(io.str().substr(0, 5), "algo,");
  const auto rows = read_csv(io);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].algo, "hash");
  std::vector<LabeledRecord> merged{{"sdp", series[0]}, {"ldg", series[0]}};
  std::stringstream m;
  write_merged_csv(merged, m);
  const auto again = read_csv(m);
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[1].algo, "ldg");
}

TEST(Csv, EmptySeriesIsHeaderOnly) {
  std::stringstream io;
  write_csv(std::vector<MetricsRecord>{}, io);
  EXPECT_EQ(io.str(), std::string(kMetricsHeader) + "\n");
  EXPECT_TRUE(read_csv(io).empty());
}

TEST(Csv, BadInputThrows) {
  std::istringstream header("seq,foo\n");
  EXPECT_THROW(read_csv(header), ParseError);
  std::istringstream row(std::string(kMetricsHeader) + "\n1,2,x,0,0,0,0,0\n");
  EXPECT_THROW(read_csv(row), ParseError);
  EXPECT_THROW(write_csv(std::vector<MetricsRecord>{}, std::filesystem::path("/nonexistent/dir/m.csv")), Error);
}

TEST(Capture, FillsCounts) {
  PartitionSummary s;
  s.add_partition();
  s.place_vertex(PartitionId{0}, VertexId{1}, {});
  const auto r = capture(s, 7, 2, MetricsClock::now());
  EXPECT_EQ(r.seq, 7u);
  EXPECT_EQ(r.interval, 2u);
  EXPECT_EQ(r.partitions, 1u);
  EXPECT_EQ(r.live_vertices, 1u);
  EXPECT_EQ(r.live_edges, 0u);
  EXPECT_GE(r.elapsed_ms, 0.0);
}
