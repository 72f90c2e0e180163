#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sdp/run.hpp"
#include "sdp/synthetic.hpp"
#include "sdp/wire.hpp"

namespace py = pybind11;
using namespace sdp;

namespace {

std::vector<VertexId> to_ids(const std::vector<std::uint64_t>& xs) {
  std::vector<VertexId> out;
  out.reserve(xs.size());
  for (const auto x : xs) out.emplace_back(x);
  return out;
}

std::vector<std::uint64_t> from_ids(std::span<const VertexId> xs) {
  std::vector<std::uint64_t> out;
  out.reserve(xs.size());
  for (const auto x : xs) out.push_back(x.value);
  return out;
}

py::dict record_dict(const MetricsRecord& r) {
  py::dict d;
  d["seq"] = r.seq;
  d["interval"] = r.interval;
  d["edge_cut_ratio"] = r.edge_cut_ratio;
  d["load_imbalance"] = r.load_imbalance;
  d["partitions"] = r.partitions;
  d["live_vertices"] = r.live_vertices;
  d["live_edges"] = r.live_edges;
  d["elapsed_ms"] = r.elapsed_ms;
  return d;
}

py::dict stats_dict(const StatsMap& stats) {
  py::dict d;
  for (const auto& [p, st] : stats) {
    py::dict s;
    s["internal_edges"] = st.internal_edges;
    s["cut_edges"] = st.cut_edges;
    s["vertex_count"] = st.vertex_count;
    s["load"] = st.load();
    d[py::int_(p.value)] = s;
  }
  return d;
}

py::dict outcome_dict(const RunOutcome& o) {
  py::dict d;
  py::list series;
  for (const auto& r : o.series) series.append(record_dict(r));
  d["series"] = series;
  py::dict placement;
  for (const auto& [v, p] : o.placement) placement[py::int_(v.value)] = p.value;
  d["placement"] = placement;
  d["final_partitions"] = o.final_partitions;
  d["migrations"] = o.migrations;
  d["warnings"] = o.warnings;
  d["messages"] = o.messages;
  d["maxcap"] = o.maxcap;
  d["shard_diff"] = o.shard_diff;
  return d;
}

RunSpec make_spec(const std::string& dataset, const py::kwargs& kw) {
  RunSpec spec;
  spec.dataset = dataset;
  for (const auto& [key_obj, value] : kw) {
    const auto key = py::cast<std::string>(key_obj);
    if (key == "format") spec.format = parse_graph_format(py::cast<std::string>(value));
    else if (key == "algo") spec.algo = parse_algorithm(py::cast<std::string>(value));
    else if (key == "intervals") spec.intervals = py::cast<std::uint32_t>(value);
    else if (key == "add") spec.add_percent = py::cast<double>(value);
    else if (key == "delete") spec.delete_percent = py::cast<double>(value);
    else if (key == "delete_edges") spec.delete_edge_percent = py::cast<double>(value);
    else if (key == "delete_stable_only") spec.delete_stable_only = py::cast<bool>(value);
    else if (key == "maxcap") spec.maxcap = py::cast<std::uint64_t>(value);
    else if (key == "k_target") spec.k_target = py::cast<std::uint32_t>(value);
    else if (key == "tolerance") spec.tolerance = py::cast<double>(value);
    else if (key == "dest_param") spec.dest_param = py::cast<double>(value);
    else if (key == "gate_direction") spec.gate_direction = parse_gate_direction(py::cast<std::string>(value));
    else if (key == "gate") spec.gate_enabled = py::cast<bool>(value);
    else if (key == "partitions") spec.partitions = py::cast<std::uint32_t>(value);
    else if (key == "seed") spec.seed = py::cast<std::uint64_t>(value);
    else if (key == "audit") spec.audit = py::cast<bool>(value);
    else if (key == "mode") spec.mode = parse_run_mode(py::cast<std::string>(value));
    else if (key == "workers") spec.workers = py::cast<std::uint32_t>(value);
    else if (key == "out") spec.out = py::cast<std::filesystem::path>(value);
    else if (key == "trace") spec.trace = py::cast<std::filesystem::path>(value);
    else throw ConfigError("unknown option '" + key + "'");
  }
  return spec;
}

// Wraps the engine with automatic sequence numbers.
class PyEngine {
 public:
  explicit PyEngine(EngineConfig cfg) : engine_(std::move(cfg)) {}

  AssignmentDecision add_vertex(std::uint64_t v, const std::vector<std::uint64_t>& nbrs) {
    return *engine_.process_event(GraphEvent::add(engine_.event_count(), VertexId{v}, to_ids(nbrs)));
  }
  void delete_vertex(std::uint64_t v) {
    engine_.process_event(GraphEvent::delete_vertex(engine_.event_count(), VertexId{v}));
  }
  void delete_edge(std::uint64_t u, std::uint64_t w) {
    engine_.process_event(GraphEvent::delete_edge(engine_.event_count(), Edge::normalized(VertexId{u}, VertexId{w})));
  }
  std::size_t scale_in() { return engine_.scale_in(); }
  std::optional<std::uint32_t> placement(std::uint64_t v) const {
    const auto p = engine_.summary().placement(VertexId{v});
    return p ? std::optional(p->value) : std::nullopt;
  }
  const Engine& engine() const { return engine_; }

 private:
  Engine engine_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming dynamic graph partitioner";
  m.attr("__version__") = SDP_PY_VERSION;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_property_readonly("vertex_count", &Dataset::vertex_count)
      .def_readonly("edge_count", &Dataset::edge_count)
      .def("neighbors", [](const Dataset& d, std::uint64_t v) { return from_ids(d.neighbors(VertexId{v})); })
      .def("original_id", [](const Dataset& d, std::uint64_t v) { return d.original_ids.at(v); })
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset " + d.name + ": " + std::to_string(d.vertex_count()) + " vertices, " +
               std::to_string(d.edge_count) + " edges>";
      });

  m.def("load_dataset", [](const std::string& source, const std::string& format) {
    return load_dataset(source, parse_graph_format(format));
  }, py::arg("source"), py::arg("format") = "snap");

  auto syn = m.def_submodule("synthetic", "deterministic generators");
  syn.def("mesh_3elt_like", &synthetic::mesh_3elt_like, py::arg("seed") = 3);
  syn.def("collaboration_grqc_like", &synthetic::collaboration_grqc_like, py::arg("seed") = 5);
  syn.def("two_cliques", &synthetic::two_cliques, py::arg("clique_size"), py::arg("bridges"), py::arg("seed") = 1);
  syn.def("random_graph", &synthetic::random_graph, py::arg("vertices"), py::arg("edges"), py::arg("seed") = 1);

  py::class_<AssignmentDecision>(m, "Decision")
      .def_property_readonly("partition", [](const AssignmentDecision& d) { return d.partition.value; })
      .def_property_readonly("reason", [](const AssignmentDecision& d) { return std::string(to_string(d.reason)); })
      .def_readonly("connectivity", &AssignmentDecision::connectivity)
      .def("__repr__", [](const AssignmentDecision& d) {
        return "<Decision partition=" + std::to_string(d.partition.value) + " reason=" + to_string(d.reason) + ">";
      });

  m.def("balance_snapshot", [](const std::map<std::uint32_t, std::uint64_t>& loads, std::uint64_t edges_seen,
                               std::uint64_t cuts_seen) {
    StatsMap stats;
    for (const auto& [p, l] : loads) stats.emplace(PartitionId{p}, PartitionStats{l, 0, 0});
    const auto s = balance_snapshot(stats, edges_seen, cuts_seen);
    py::dict d;
    d["avg_d"] = s.avg_d;
    d["load_dev"] = s.load_dev;
    d["w_dev"] = s.w_dev;
    d["th"] = s.th;
    d["intervene"] = s.intervene;
    return d;
  }, py::arg("loads"), py::arg("edges_seen"), py::arg("cuts_seen"));

  py::class_<PyEngine>(m, "Engine")
      .def(py::init([](std::uint64_t maxcap, double tolerance, double dest_param, std::uint64_t seed, bool gate,
                       const std::string& gate_direction, std::uint32_t initial_partitions, bool autoscale,
                       const std::string& algo, std::uint64_t ldg_capacity) {
             EngineConfig cfg;
             cfg.scaling = {maxcap, tolerance, dest_param};
             cfg.rng_seed = seed;
             cfg.gate_enabled = gate;
             cfg.gate_direction = parse_gate_direction(gate_direction);
             cfg.initial_partitions = initial_partitions;
             cfg.autoscale = autoscale;
             cfg.algorithm = parse_algorithm(algo);
             cfg.ldg_capacity = ldg_capacity;
             return PyEngine(cfg);
           }),
           py::kw_only(), py::arg("maxcap") = 0, py::arg("tolerance") = 20.0, py::arg("dest_param") = 5.0,
           py::arg("seed") = 0, py::arg("gate") = true, py::arg("gate_direction") = "prose",
           py::arg("initial_partitions") = 1, py::arg("autoscale") = true, py::arg("algo") = "sdp",
           py::arg("ldg_capacity") = 0)
      .def("add_vertex", &PyEngine::add_vertex, py::arg("vertex"), py::arg("neighbors") = std::vector<std::uint64_t>{})
      .def("delete_vertex", &PyEngine::delete_vertex)
      .def("delete_edge", &PyEngine::delete_edge)
      .def("scale_in", &PyEngine::scale_in)
      .def("placement", &PyEngine::placement)
      .def_property_readonly("partition_count", [](const PyEngine& e) { return e.engine().partition_count(); })
      .def_property_readonly("event_count", [](const PyEngine& e) { return e.engine().event_count(); })
      .def_property_readonly("warn_count", [](const PyEngine& e) { return e.engine().warn_count(); })
      .def_property_readonly("edges_seen", [](const PyEngine& e) { return e.engine().edges_seen(); })
      .def_property_readonly("cuts_seen", [](const PyEngine& e) { return e.engine().cuts_seen(); })
      .def("stats", [](const PyEngine& e) { return stats_dict(e.engine().stats()); })
      .def("edge_cut_ratio", [](const PyEngine& e) { return edge_cut_ratio(e.engine().summary()); })
      .def("load_imbalance", [](const PyEngine& e) { return load_imbalance(e.engine().summary()); })
      .def("check_invariants", [](const PyEngine& e) { check_invariants(e.engine().summary()); });

  m.def("run", [](const std::string& dataset, const py::kwargs& kw) {
    const auto spec = make_spec(dataset, kw);
    RunOutcome o;
    {
      py::gil_scoped_release release;
      o = run(spec);
    }
    return outcome_dict(o);
  }, py::arg("dataset"), "Run one algorithm; keyword options mirror the command line flags.");

  m.def("compare", [](const std::string& dataset, const std::vector<std::string>& algos, const py::kwargs& kw) {
    const auto spec = make_spec(dataset, kw);
    std::vector<Algorithm> list;
    for (const auto& a : algos) list.push_back(parse_algorithm(a));
    CompareOutcome c;
    {
      py::gil_scoped_release release;
      c = compare(spec, list);
    }
    py::dict out;
    for (const auto& [name, o] : c.runs) out[py::str(name)] = outcome_dict(o);
    return out;
  }, py::arg("dataset"), py::arg("algos") = std::vector<std::string>{"sdp", "hash", "ldg"});

  m.def("decode_frame", [](const py::bytes& frame) {
    const std::string raw = frame;
    const std::vector<std::uint8_t> bytes(raw.begin(), raw.end());
    const auto msg = wire::decode(bytes);
    py::dict d;
    d["kind"] = wire::to_string(wire::kind_of(msg));
    d["seq"] = wire::seq_of(msg);
    std::visit([&](const auto& x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (requires { x.partition; }) d["partition"] = x.partition.value;
      if constexpr (requires { x.vertex; }) d["vertex"] = x.vertex.value;
      if constexpr (requires { x.neighbors; }) d["neighbors"] = from_ids(x.neighbors);
      if constexpr (std::is_same_v<T, wire::DeleteEdge>) d["edge"] = py::make_tuple(x.u.value, x.w.value);
      if constexpr (std::is_same_v<T, wire::Ack>) d["status"] = static_cast<int>(x.status);
      if constexpr (requires { x.entries; }) {
        py::dict entries;
        for (const auto& e : x.entries) entries[py::int_(e.vertex.value)] = from_ids(e.neighbors);
        d["entries"] = entries;
      }
    }, msg);
    return d;
  }, py::arg("frame"));
}
