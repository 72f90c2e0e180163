#include "sdp/stream.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include <json.hpp>

namespace sdp {

ScenarioConfig ScenarioConfig::seeded(std::uint64_t root) {
  ScenarioConfig cfg;
  cfg.order_seed = derive_seed(root, "order");
  cfg.delete_seed = derive_seed(root, "delete");
  cfg.delete_edge_seed = derive_seed(root, "delete-edge");
  return cfg;
}

ScenarioConfig ScenarioConfig::add_only(std::uint64_t root) {
  auto cfg = seeded(root);
  cfg.add_percent = 100.0;
  cfg.delete_vertex_percent = 0.0;
  cfg.intervals = 1;
  return cfg;
}

void ScenarioConfig::validate() const {
  auto in_range = [](double p) { return p >= 0.0 && p <= 100.0; };
  if (!in_range(add_percent)) throw ConfigError("add percent must lie in [0, 100]");
  if (!in_range(delete_vertex_percent)) throw ConfigError("delete percent must lie in [0, 100]");
  if (!in_range(delete_edge_percent)) throw ConfigError("edge delete percent must lie in [0, 100]");
  if (intervals == 0) throw ConfigError("at least one interval is required");
  if (add_percent * intervals > 100.0 + 1e-9) throw ConfigError("intervals x add percent exceeds 100");
  if (delete_vertex_percent * intervals > 100.0 + 1e-9) throw ConfigError("intervals x delete percent exceeds 100");
}

std::uint64_t percent_count(std::uint64_t total, double percent) {
  const long double exact = static_cast<long double>(total) * static_cast<long double>(percent) / 100.0L;
  return static_cast<std::uint64_t>(std::floor(exact + 1e-9L));
}

namespace {

// Live vertices split by whether they arrived in the current interval, so deletions can be
// restricted to older vertices. Removal is swap-with-last; order only has to be deterministic.
class LivePool {
 public:
  void add(VertexId v) { fresh_.push_back(v); }
  void close_interval() {
    older_.insert(older_.end(), fresh_.begin(), fresh_.end());
    fresh_.clear();
  }
  std::size_t eligible(bool stable_only) const { return older_.size() + (stable_only ? 0 : fresh_.size()); }
  VertexId take(Rng& rng, bool stable_only) {
    auto idx = rng.below(eligible(stable_only));
    auto& pool = idx < older_.size() ? older_ : fresh_;
    if (idx >= older_.size()) idx -= older_.size();
    const auto v = pool[idx];
    pool[idx] = pool.back();
    pool.pop_back();
    return v;
  }
  std::vector<VertexId> all() const {
    std::vector<VertexId> out(older_);
    out.insert(out.end(), fresh_.begin(), fresh_.end());
    return out;
  }

 private:
  std::vector<VertexId> older_;
  std::vector<VertexId> fresh_;
};

std::uint64_t share(std::uint64_t total, double percent, std::uint32_t interval, std::uint32_t intervals) {
  const auto each = percent_count(total, percent);
  if (interval + 1 < intervals) return each;
  const auto overall = percent_count(total, percent * intervals);
  return overall - each * (intervals - 1);
}

}  // namespace

Schedule build_schedule(const Dataset& d, const ScenarioConfig& cfg) {
  cfg.validate();
  const auto n = d.vertex_count();
  const auto order = stream_permutation(d, cfg.file_order ? StreamOrder::file_order()
                                                          : StreamOrder::shuffled(cfg.order_seed));
  Rng del_rng(cfg.delete_seed);
  Rng edge_rng(cfg.delete_edge_seed);

  Schedule s;
  LivePool pool;
  std::vector<bool> live(n, false);
  std::unordered_set<Edge> deleted_edges;
  std::size_t cursor = 0;
  auto push = [&s](GraphEvent ev) {
    ev.seq = s.events.size();
    s.events.push_back(std::move(ev));
  };

  for (std::uint32_t i = 0; i < cfg.intervals; ++i) {
    const auto n_add = share(n, cfg.add_percent, i, cfg.intervals);
    const auto n_del = share(n, cfg.delete_vertex_percent, i, cfg.intervals);
    const auto n_del_edges = share(d.edge_count, cfg.delete_edge_percent, i, cfg.intervals);

    for (std::uint64_t j = 0; j < n_add; ++j) {
      const auto v = order.at(cursor++);
      const auto& nbrs = d.neighbors(v);
      push(GraphEvent::add(0, v, std::vector<VertexId>(nbrs.begin(), nbrs.end())));
      live[v.value] = true;
      pool.add(v);
    }
    s.add_marks.push_back(s.events.size());

    if (pool.eligible(cfg.delete_stable_only) < n_del) {
      throw ScheduleError("interval " + std::to_string(i + 1) + " needs " + std::to_string(n_del) +
                          " deletions but only " + std::to_string(pool.eligible(cfg.delete_stable_only)) +
                          " vertices are eligible");
    }
    for (std::uint64_t j = 0; j < n_del; ++j) {
      const auto v = pool.take(del_rng, cfg.delete_stable_only);
      live[v.value] = false;
      push(GraphEvent::delete_vertex(0, v));
    }

    if (n_del_edges > 0) {
      auto vs = pool.all();
      std::sort(vs.begin(), vs.end());
      std::vector<Edge> candidates;
      for (const auto v : vs) {
        for (const auto u : d.neighbors(v)) {
          const auto e = Edge::normalized(v, u);
          if (v < u && live[u.value] && !deleted_edges.contains(e)) candidates.push_back(e);
        }
      }
      if (candidates.size() < n_del_edges) {
        throw ScheduleError("interval " + std::to_string(i + 1) + " needs " + std::to_string(n_del_edges) +
                            " edge deletions but only " + std::to_string(candidates.size()) + " edges are live");
      }
      for (std::uint64_t j = 0; j < n_del_edges; ++j) {
        const auto k = j + edge_rng.below(candidates.size() - j);
        std::swap(candidates[j], candidates[k]);
        deleted_edges.insert(candidates[j]);
        push(GraphEvent::delete_edge(0, candidates[j]));
      }
    }

    if (!s.interval_marks.empty() && s.events.size() == s.interval_marks.back()) {
      throw ScheduleError("interval " + std::to_string(i + 1) + " contains no events");
    }
    if (s.events.empty()) throw ScheduleError("interval 1 contains no events");
    s.interval_marks.push_back(s.events.size());
    pool.close_interval();
  }
  return s;
}

void check_schedule(const Schedule& s) {
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (s.events[i].seq != i) throw ScheduleError("event " + std::to_string(i) + " has seq " + std::to_string(s.events[i].seq));
  }
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < s.interval_marks.size(); ++i) {
    const auto m = s.interval_marks[i];
    if (m <= prev || m > s.events.size()) throw ScheduleError("interval mark " + std::to_string(m) + " out of order");
    if (i < s.add_marks.size() && (s.add_marks[i] < prev || s.add_marks[i] > m)) {
      throw ScheduleError("add mark " + std::to_string(s.add_marks[i]) + " outside its interval");
    }
    prev = m;
  }
  if (!s.add_marks.empty() && s.add_marks.size() != s.interval_marks.size()) {
    throw ScheduleError("add marks and interval marks differ in count");
  }
  std::unordered_set<VertexId> live;
  for (const auto& ev : s.events) {
    if (ev.kind == EventKind::AddVertex && !live.insert(ev.vertex).second) {
      throw ScheduleError("seq " + std::to_string(ev.seq) + " re-adds live vertex " + std::to_string(ev.vertex.value));
    }
    if (ev.kind == EventKind::DeleteVertex && live.erase(ev.vertex) == 0) {
      throw ScheduleError("seq " + std::to_string(ev.seq) + " deletes vertex " + std::to_string(ev.vertex.value) +
                          " which is not live");
    }
  }
}

ReplayReport replay(const Schedule& schedule, const std::function<void(const GraphEvent&)>& sink,
                    const ReplayHooks& hooks, unsigned producers) {
  const auto total = schedule.events.size();
  producers = std::max(1u, producers);
  constexpr std::size_t kWindow = 256;

  struct Slot {
    GraphEvent event;
    bool ready{false};
  };
  std::vector<Slot> ring(kWindow);
  std::mutex mu;
  std::condition_variable produced;
  std::condition_variable consumed;
  std::uint64_t next = 0;
  bool stop = false;

  std::vector<std::jthread> workers;
  for (unsigned t = 0; t < producers; ++t) {
    workers.emplace_back([&, t] {
      for (std::uint64_t seq = t; seq < total; seq += producers) {
        GraphEvent copy = schedule.events[seq];
        std::unique_lock lock(mu);
        consumed.wait(lock, [&] { return stop || seq < next + kWindow; });
        if (stop) return;
        ring[seq % kWindow] = {std::move(copy), true};
        produced.notify_all();
      }
    });
  }
  auto halt = [&] {
    {
      std::lock_guard lock(mu);
      stop = true;
    }
    consumed.notify_all();
    workers.clear();
  };

  ReplayReport report;
  std::size_t add_i = 0;
  std::size_t mark_i = 0;
  try {
    while (report.delivered < total) {
      GraphEvent ev;
      {
        std::unique_lock lock(mu);
        auto& slot = ring[next % kWindow];
        produced.wait(lock, [&] { return slot.ready; });
        ev = std::move(slot.event);
        slot.ready = false;
        ++next;
      }
      consumed.notify_all();
      sink(ev);
      ++report.delivered;
      while (add_i < schedule.add_marks.size() && schedule.add_marks[add_i] == report.delivered) {
        if (hooks.on_adds_done) hooks.on_adds_done(static_cast<std::uint32_t>(add_i + 1));
        ++add_i;
      }
      while (mark_i < schedule.interval_marks.size() && schedule.interval_marks[mark_i] == report.delivered) {
        ++mark_i;
        ++report.intervals_fired;
        if (hooks.on_interval) hooks.on_interval(static_cast<std::uint32_t>(mark_i));
      }
    }
  } catch (const std::exception& e) {
    halt();
    std::optional<std::uint64_t> last;
    if (report.delivered > 0) last = report.delivered - 1;
    throw ReplayAborted(std::string("replay aborted at seq ") + std::to_string(report.delivered) + ": " + e.what(),
                        report.delivered, last);
  }
  halt();
  return report;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson event_json(const GraphEvent& ev) {
  ojson j;
  j["seq"] = ev.seq;
  j["op"] = to_string(ev.kind);
  switch (ev.kind) {
    case EventKind::AddVertex: {
      j["v"] = ev.vertex.value;
      auto nbrs = ojson::array();
      for (const auto u : ev.neighbors) nbrs.push_back(u.value);
      j["nbrs"] = std::move(nbrs);
      break;
    }
    case EventKind::DeleteVertex:
      j["v"] = ev.vertex.value;
      break;
    case EventKind::DeleteEdge:
      j["u"] = ev.edge.src.value;
      j["w"] = ev.edge.dst.value;
      break;
  }
  return j;
}

ojson mark_json(const char* phase, std::uint64_t at) {
  ojson j;
  j["op"] = "mark";
  j["phase"] = phase;
  j["at"] = at;
  return j;
}

}  // namespace

void write_trace(const Schedule& s, std::ostream& out) {
  std::size_t add_i = 0;
  std::size_t mark_i = 0;
  auto flush_marks = [&](std::uint64_t delivered) {
    while (add_i < s.add_marks.size() && s.add_marks[add_i] == delivered) {
      out << mark_json("adds", delivered).dump() << '\n';
      ++add_i;
    }
    while (mark_i < s.interval_marks.size() && s.interval_marks[mark_i] == delivered) {
      out << mark_json("interval", delivered).dump() << '\n';
      ++mark_i;
    }
  };
  flush_marks(0);
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    out << event_json(s.events[i]).dump() << '\n';
    flush_marks(i + 1);
  }
}

void write_trace(const Schedule& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_trace(s, out);
  out.flush();
  if (!out) throw Error("write failed for " + path.string());
}

Schedule read_trace(std::istream& in) {
  Schedule s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto op = j.at("op").get<std::string>();
      if (op == "mark") {
        const auto phase = j.at("phase").get<std::string>();
        const auto at = j.at("at").get<std::uint64_t>();
        if (at != s.events.size()) throw ParseError("mark does not follow event " + std::to_string(at), lineno);
        if (phase == "adds") {
          s.add_marks.push_back(at);
        } else if (phase == "interval") {
          s.interval_marks.push_back(at);
        } else {
          throw ParseError("unknown mark phase '" + phase + "'", lineno);
        }
        continue;
      }
      const auto seq = j.at("seq").get<std::uint64_t>();
      if (seq != s.events.size()) {
        throw ParseError("expected seq " + std::to_string(s.events.size()) + ", found " + std::to_string(seq), lineno);
      }
      if (op == "add") {
        std::vector<VertexId> nbrs;
        for (const auto& u : j.at("nbrs")) nbrs.emplace_back(u.get<std::uint64_t>());
        s.events.push_back(GraphEvent::add(seq, VertexId{j.at("v").get<std::uint64_t>()}, std::move(nbrs)));
      } else if (op == "delv") {
        s.events.push_back(GraphEvent::delete_vertex(seq, VertexId{j.at("v").get<std::uint64_t>()}));
      } else if (op == "dele") {
        s.events.push_back(GraphEvent::delete_edge(
            seq, Edge::normalized(VertexId{j.at("u").get<std::uint64_t>()}, VertexId{j.at("w").get<std::uint64_t>()})));
      } else {
        throw ParseError("unknown op '" + op + "'", lineno);
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad trace line: ") + e.what(), lineno);
    }
  }
  check_schedule(s);
  return s;
}

Schedule read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read_trace(in);
}

StreamResult run_stream(Engine& engine, const Schedule& schedule, const StreamHooks& hooks, unsigned producers) {
  const auto start = MetricsClock::now();
  if (engine.event_count() != 0) throw OrderingError("run_stream needs an engine that has not seen events");

  StreamResult result;
  ReplayHooks rh;
  rh.on_adds_done = [&](std::uint32_t i) {
    if (hooks.after_adds) hooks.after_adds(engine, i);
  };
  rh.on_interval = [&](std::uint32_t i) {
    result.migrations += engine.scale_in();
    result.series.push_back(capture(engine.summary(), engine.event_count(), i, start));
    if (hooks.after_interval) hooks.after_interval(engine, result.series.back());
  };
  result.report = replay(schedule, [&](const GraphEvent& ev) { engine.process_event(ev); }, rh, producers);

  const auto last_mark = schedule.interval_marks.empty() ? 0 : schedule.interval_marks.back();
  if (schedule.events.size() > last_mark) {
    const auto interval = static_cast<std::uint32_t>(schedule.interval_marks.size() + 1);
    result.series.push_back(capture(engine.summary(), engine.event_count(), interval, start));
    if (hooks.after_interval) hooks.after_interval(engine, result.series.back());
  }
  return result;
}

}  // namespace sdp
