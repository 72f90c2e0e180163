#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <sstream>

#include "sdp/stream.hpp"
#include "sdp/synthetic.hpp"

using namespace sdp;

namespace {

struct Counts {
  std::uint64_t adds{0};
  std::uint64_t deletes{0};
};

// Per-interval counts read back from the events and marks.
std::vector<Counts> interval_counts(const Schedule& s) {
  std::vector<Counts> out;
  std::uint64_t begin = 0;
  for (std::size_t i = 0; i < s.interval_marks.size(); ++i) {
    Counts c;
    for (auto j = begin; j < s.interval_marks[i]; ++j) {
      const auto& ev = s.events[j];
      if (ev.kind == EventKind::AddVertex) {
        EXPECT_LT(j, s.add_marks[i]);
        ++c.adds;
      } else if (ev.kind == EventKind::DeleteVertex) {
        EXPECT_GE(j, s.add_marks[i]);
        ++c.deletes;
      }
    }
    out.push_back(c);
    begin = s.interval_marks[i];
  }
  return out;
}

}  // namespace

TEST(PercentCount, FloorWithoutBinaryDrift) {
  EXPECT_EQ(percent_count(4200, 25), 1050u);
  EXPECT_EQ(percent_count(4200, 5), 210u);
  EXPECT_EQ(percent_count(5242, 25), 1310u);
  EXPECT_EQ(percent_count(100, 29), 29u);  // 0.29 * 100 is 28.999... in binary
  EXPECT_EQ(percent_count(100, 0.7), 0u);
  EXPECT_EQ(percent_count(0, 50), 0u);
}

TEST(Schedule, MeshStandInIntervalCounts) {
  const auto d = synthetic::mesh_3elt_like();
  const auto s = build_schedule(d, ScenarioConfig::seeded(1));
  ASSERT_EQ(s.interval_marks.size(), 4u);
  for (const auto& c : interval_counts(s)) {
    EXPECT_EQ(c.adds, 4200u * 25 / 100);
    EXPECT_EQ(c.deletes, 4200u * 5 / 100);
  }
  check_schedule(s);
}

TEST(Schedule, RemainderGoesToLastInterval) {
  const auto d = synthetic::collaboration_grqc_like();
  const auto s = build_schedule(d, ScenarioConfig::seeded(3));
  const auto counts = interval_counts(s);
  ASSERT_EQ(counts.size(), 4u);
  const std::uint64_t each_add = 5242 * 25 / 100, each_del = 5242 * 5 / 100;
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(counts[i].adds, each_add);
    EXPECT_EQ(counts[i].deletes, each_del);
  }
  EXPECT_EQ(counts[3].adds, 5242 - 3 * each_add);
  EXPECT_EQ(counts[3].deletes, 5242 * 20 / 100 - 3 * each_del);
}

TEST(Schedule, LiveCountAndDeletionValidity) {
  const auto d = synthetic::random_graph(400, 1200, 1);
  auto cfg = ScenarioConfig::seeded(8);
  cfg.delete_edge_percent = 2;
  const auto s = build_schedule(d, cfg);
  std::set<VertexId> live;
  std::set<Edge> deleted;
  std::size_t mark = 0;
  for (const auto& ev : s.events) {
    switch (ev.kind) {
      case EventKind::AddVertex:
        ASSERT_TRUE(live.insert(ev.vertex).second);
        ASSERT_EQ(ev.neighbors, d.neighbors(ev.vertex));
        break;
      case EventKind::DeleteVertex:
        ASSERT_EQ(live.erase(ev.vertex), 1u);
        break;
      case EventKind::DeleteEdge:
        ASSERT_TRUE(live.contains(ev.edge.src) && live.contains(ev.edge.dst));
        ASSERT_TRUE(deleted.insert(ev.edge).second);
        break;
    }
    if (mark < s.interval_marks.size() && ev.seq + 1 == s.interval_marks[mark]) {
      ++mark;
      EXPECT_EQ(live.size(), mark * (100 - 20));
    }
  }
  EXPECT_EQ(deleted.size(), 4u * (1200 * 2 / 100));
}

TEST(Schedule, StableOnlyDeletesOlderVertices) {
  const auto d = synthetic::random_graph(400, 800, 2);
  auto cfg = ScenarioConfig::seeded(4);
  cfg.delete_stable_only = true;
  cfg.intervals = 3;
  cfg.add_percent = 30;
  EXPECT_THROW(build_schedule(d, cfg), ScheduleError);  // nothing older in interval 1
  cfg.delete_vertex_percent = 0;
  EXPECT_NO_THROW(build_schedule(d, cfg));
}

TEST(Schedule, AddOnlyEqualsDatasetEvents) {
  const auto d = synthetic::random_graph(200, 500, 9);
  const auto cfg = ScenarioConfig::add_only(5);
  const auto s = build_schedule(d, cfg);
  EXPECT_EQ(s.events, dataset_to_add_events(d, StreamOrder::shuffled(cfg.order_seed)));
  EXPECT_EQ(s.interval_marks, std::vector<std::uint64_t>{200});
}

TEST(Schedule, SeedsControlOrder) {
  const auto d = synthetic::random_graph(200, 500, 9);
  EXPECT_EQ(build_schedule(d, ScenarioConfig::seeded(1)), build_schedule(d, ScenarioConfig::seeded(1)));
  EXPECT_NE(build_schedule(d, ScenarioConfig::seeded(1)), build_schedule(d, ScenarioConfig::seeded(2)));
  auto cfg = ScenarioConfig::seeded(1);
  cfg.add_percent = 30;
  EXPECT_THROW(build_schedule(d, cfg), ConfigError);
}

TEST(Schedule, CheckRejectsBrokenSchedules) {
  const auto d = synthetic::random_graph(100, 200, 1);
  auto s = build_schedule(d, ScenarioConfig::seeded(1));
  auto broken = s;
  broken.events[3].seq = 7;
  EXPECT_THROW(check_schedule(broken), ScheduleError);
  broken = s;
  broken.interval_marks[1] = broken.interval_marks[0];
  EXPECT_THROW(check_schedule(broken), ScheduleError);
  broken = s;
  broken.events[0] = GraphEvent::delete_vertex(0, VertexId{0});
  EXPECT_THROW(check_schedule(broken), ScheduleError);
}

TEST(Replay, DeliversInOrderWithHooks) {
  const auto d = synthetic::random_graph(300, 900, 3);
  const auto s = build_schedule(d, ScenarioConfig::seeded(6));
  for (unsigned producers : {1u, 2u, 8u}) {
    std::uint64_t expected = 0;
    std::vector<std::uint64_t> adds_at, marks_at;
    ReplayHooks hooks;
    hooks.on_adds_done = [&](std::uint32_t i) {
      EXPECT_EQ(i, adds_at.size() + 1);
      adds_at.push_back(expected);
    };
    hooks.on_interval = [&](std::uint32_t i) {
      EXPECT_EQ(i, marks_at.size() + 1);
      marks_at.push_back(expected);
    };
    const auto report = replay(s, [&](const GraphEvent& ev) { ASSERT_EQ(ev.seq, expected++); }, hooks, producers);
    EXPECT_EQ(report.delivered, s.events.size());
    EXPECT_EQ(report.intervals_fired, 4u);
    EXPECT_EQ(adds_at, s.add_marks);
    EXPECT_EQ(marks_at, s.interval_marks);
  }
}

TEST(Replay, SinkFailureAbortsWithProgress) {
  const auto d = synthetic::random_graph(300, 900, 3);
  const auto s = build_schedule(d, ScenarioConfig::seeded(6));
  try {
    replay(s, [](const GraphEvent& ev) {
      if (ev.seq == 123) throw TransportError("worker gone");
    }, {}, 4);
    FAIL() << "expected ReplayAborted";
  } catch (const ReplayAborted& e) {
    EXPECT_EQ(e.delivered(), 123u);
    EXPECT_EQ(e.last_seq(), 122u);
    EXPECT_NE(std::string(e.what()).find("worker gone"), std::string::npos);
  }
}

TEST(Trace, RoundTrip) {
  const auto d = synthetic::random_graph(150, 400, 3);
  auto cfg = ScenarioConfig::seeded(2);
  cfg.delete_edge_percent = 3;
  const auto s = build_schedule(d, cfg);
  std::stringstream io;
  write_trace(s, io);
  EXPECT_EQ(read_trace(io), s);
  const auto first = io.str().substr(0, io.str().find('\n'));
  EXPECT_EQ(first.rfind(R"({"seq":0,"op":"add","v":)", 0), 0u) << first;
}

TEST(Trace, MalformedLinesReportLineNumbers) {
  std::istringstream bad_op(R"({"seq":0,"op":"frob","v":1})" "\n");
  EXPECT_THROW(read_trace(bad_op), ParseError);
  std::istringstream gap(R"({"seq":0,"op":"add","v":1,"nbrs":[]})" "\n" R"({"seq":2,"op":"delv","v":1})" "\n");
  EXPECT_THROW(read_trace(gap), ParseError);
  std::istringstream junk("not json\n");
  EXPECT_THROW(read_trace(junk), ParseError);
}

TEST(RunStream, OneRecordPerInterval) {
  const auto d = synthetic::mesh_3elt_like();
  const auto s = build_schedule(d, ScenarioConfig::seeded(1));
  EngineConfig cfg;
  cfg.scaling = {4000, 20, 5};
  Engine e(cfg);
  std::atomic<int> adds_hooks{0};
  StreamHooks hooks;
  hooks.after_adds = [&](const Engine& eng, std::uint32_t) { EXPECT_GT(eng.summary().live_vertex_count(), 0u); ++adds_hooks; };
  const auto r = run_stream(e, s, hooks);
  ASSERT_EQ(r.series.size(), 4u);
  EXPECT_EQ(adds_hooks, 4);
  for (std::uint32_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.series[i].interval, i + 1);
    EXPECT_EQ(r.series[i].seq, s.interval_marks[i]);
    EXPECT_EQ(r.series[i].live_vertices, (i + 1) * 840u);
    EXPECT_GE(r.series[i].edge_cut_ratio, 0.0);
    EXPECT_LE(r.series[i].edge_cut_ratio, 1.0);
  }
  EXPECT_EQ(r.report.delivered, s.events.size());
  EXPECT_THROW(run_stream(e, s), OrderingError);
}

TEST(RunStream, TrailingEventsGetFinalRecord) {
  const auto d = synthetic::random_graph(100, 200, 1);
  auto s = build_schedule(d, ScenarioConfig::seeded(1));
  s.interval_marks.pop_back();
  s.add_marks.pop_back();
  EngineConfig cfg;
  cfg.scaling = {50, 20, 5};
  Engine e(cfg);
  const auto r = run_stream(e, s);
  ASSERT_EQ(r.series.size(), 4u);
  EXPECT_EQ(r.series.back().seq, s.events.size());
  EXPECT_EQ(r.series.back().interval, 4u);
}
