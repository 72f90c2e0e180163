#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sdp/run.hpp"
#include "sdp/synthetic.hpp"
#include "sdp/transport.hpp"

namespace {

using namespace sdp;

constexpr int kUsage = 2;
constexpr int kRuntime = 1;

struct Flags {
  RunSpec spec;
  std::string format{"snap"};
  std::string algo{"sdp"};
  std::string mode{"inproc"};
  std::string gate_direction{"prose"};
  std::string out;
  std::string manifest;
  bool no_gate{false};
};

void add_spec_flags(CLI::App* cmd, Flags& f, bool with_dataset) {
  if (with_dataset) {
    cmd->add_option("--dataset", f.spec.dataset, "edge list path, or synthetic:{3elt,grqc,two-cliques}")->required();
  }
  cmd->add_option("--format", f.format, "snap | chaco (metis)")->capture_default_str();
  cmd->add_option("--manifest", f.manifest, "dataset manifest with vertex and edge counts");
  cmd->add_option("--intervals", f.spec.intervals, "number of intervals")->capture_default_str();
  cmd->add_option("--add", f.spec.add_percent, "percent of vertices added per interval")->capture_default_str();
  cmd->add_option("--delete", f.spec.delete_percent, "percent of vertices deleted per interval")
      ->capture_default_str();
  cmd->add_option("--delete-edges", f.spec.delete_edge_percent, "percent of edges deleted per interval")
      ->capture_default_str();
  cmd->add_flag("--delete-stable-only", f.spec.delete_stable_only,
                "never delete vertices added in the same interval");
  cmd->add_option("--maxcap", f.spec.maxcap, "edge-load capacity per partition (default 1.2 |E| / k-target)");
  cmd->add_option("--k-target", f.spec.k_target, "target k for the default maxcap")->capture_default_str();
  cmd->add_option("--tolerance", f.spec.tolerance, "scale-in threshold, percent of maxcap")->capture_default_str();
  cmd->add_option("--dest-param", f.spec.dest_param, "destination headroom, percent of maxcap")
      ->capture_default_str();
  cmd->add_option("--gate-direction", f.gate_direction, "prose | listing")->capture_default_str();
  cmd->add_flag("--no-gate", f.no_gate, "disable the balancing gate");
  cmd->add_option("--partitions", f.spec.partitions, "fixed partition count for baselines (default k-target)");
  cmd->add_option("--seed", f.spec.seed, "root seed")->capture_default_str();
  cmd->add_option("--mode", f.mode, "inproc | distributed")->capture_default_str();
  cmd->add_option("--workers", f.spec.workers, "maximum live workers in distributed mode")->capture_default_str();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--audit", f.spec.audit, "write the per-decision audit log");
}

RunSpec finish(Flags& f) {
  auto spec = f.spec;
  spec.format = parse_graph_format(f.format);
  spec.algo = parse_algorithm(f.algo);
  spec.mode = parse_run_mode(f.mode);
  spec.gate_direction = parse_gate_direction(f.gate_direction);
  spec.gate_enabled = !f.no_gate;
  if (!f.out.empty()) spec.out = f.out;
  if (!f.manifest.empty()) spec.manifest = f.manifest;
  if (spec.mode == RunMode::Distributed) {
    std::error_code ec;
    spec.worker_executable = std::filesystem::read_symlink("/proc/self/exe", ec);
  }
  return spec;
}

void print_outcome(const std::string& label, const RunOutcome& r) {
  std::printf("%s: %zu records, final k=%zu, migrations=%zu, warnings=%llu", label.c_str(), r.series.size(),
              r.final_partitions, r.migrations, static_cast<unsigned long long>(r.warnings));
  if (!r.series.empty()) {
    std::printf(", edge_cut_ratio=%.4f, load_imbalance=%.2f", r.series.back().edge_cut_ratio,
                r.series.back().load_imbalance);
  }
  if (r.shard_placement) std::printf(", shards match (%llu messages)", static_cast<unsigned long long>(r.messages));
  std::printf("\n");
}

Dataset generate(const std::string& kind, std::uint64_t seed, std::uint64_t n, std::uint64_t m) {
  if (kind == "3elt") return synthetic::mesh_3elt_like(seed);
  if (kind == "grqc") return synthetic::collaboration_grqc_like(seed);
  if (kind == "two-cliques") return synthetic::two_cliques(static_cast<std::uint32_t>(n ? n : 500), 10, seed);
  if (kind == "random") return synthetic::random_graph(n, m, seed);
  throw ConfigError("unknown generator '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming dynamic graph partitioner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SDP_VERSION);

  Flags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run one algorithm over a dataset");
  add_spec_flags(run_cmd, run_flags, true);
  run_cmd->add_option("--algo", run_flags.algo, "sdp | hash | ldg")->capture_default_str();

  Flags cmp_flags;
  std::string cmp_algos{"sdp,hash,ldg"};
  auto* cmp_cmd = app.add_subcommand("compare", "run several algorithms on the identical trace");
  add_spec_flags(cmp_cmd, cmp_flags, false);
  cmp_cmd->add_option("--dataset", cmp_flags.spec.dataset, "edge list path or synthetic:<name>");
  std::string cmp_trace;
  cmp_cmd->add_option("--trace", cmp_trace, "JSON-lines trace to replay instead of a dataset");
  cmp_cmd->add_option("--algos", cmp_algos, "comma separated algorithms")->capture_default_str();

  Flags rep_flags;
  std::string trace_path;
  auto* replay_cmd = app.add_subcommand("replay", "replay a JSON-lines trace");
  replay_cmd->add_option("trace", trace_path, "trace file")->required();
  add_spec_flags(replay_cmd, rep_flags, false);
  replay_cmd->add_option("--algo", rep_flags.algo, "sdp | hash | ldg")->capture_default_str();

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "per-interval comparison table");
  report_cmd->add_option("dir", report_dir, "run or compare output directory, or a metrics CSV")->required();

  std::string listen{"127.0.0.1:0"};
  auto* worker_cmd = app.add_subcommand("worker", "serve one partition shard");
  worker_cmd->add_option("--listen", listen, "host:port (port 0 picks one)")->capture_default_str();

  std::string gen_kind;
  std::string gen_out;
  std::string gen_format{"snap"};
  std::uint64_t gen_seed = 1, gen_n = 0, gen_m = 0;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic dataset and its manifest");
  gen_cmd->add_option("kind", gen_kind, "3elt | grqc | two-cliques | random")->required();
  gen_cmd->add_option("--out", gen_out, "output file")->required();
  gen_cmd->add_option("--format", gen_format, "snap | chaco")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "generator seed")->capture_default_str();
  gen_cmd->add_option("--vertices", gen_n, "vertex count (random) or clique size (two-cliques)");
  gen_cmd->add_option("--edges", gen_m, "edge count (random)");

  Flags trace_flags;
  std::string trace_out;
  auto* trace_cmd = app.add_subcommand("trace", "export the event schedule as JSON lines");
  trace_cmd->add_option("--dataset", trace_flags.spec.dataset, "edge list path or synthetic:<name>")->required();
  trace_cmd->add_option("--format", trace_flags.format, "snap | chaco")->capture_default_str();
  trace_cmd->add_option("--intervals", trace_flags.spec.intervals)->capture_default_str();
  trace_cmd->add_option("--add", trace_flags.spec.add_percent)->capture_default_str();
  trace_cmd->add_option("--delete", trace_flags.spec.delete_percent)->capture_default_str();
  trace_cmd->add_option("--delete-edges", trace_flags.spec.delete_edge_percent)->capture_default_str();
  trace_cmd->add_flag("--delete-stable-only", trace_flags.spec.delete_stable_only);
  trace_cmd->add_option("--seed", trace_flags.spec.seed)->capture_default_str();
  trace_cmd->add_option("--out", trace_out, "trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (run_cmd->parsed()) {
      const auto spec = finish(run_flags);
      print_outcome(to_string(spec.algo), run(spec));
    } else if (cmp_cmd->parsed()) {
      if (!cmp_trace.empty()) cmp_flags.spec.trace = cmp_trace;
      const auto spec = finish(cmp_flags);
      std::vector<Algorithm> algos;
      std::stringstream ss(cmp_algos);
      for (std::string a; std::getline(ss, a, ',');) algos.push_back(parse_algorithm(a));
      const auto outcome = compare(spec, algos);
      for (const auto& [name, r] : outcome.runs) print_outcome(name, r);
      std::cout << format_report(outcome.merged);
    } else if (replay_cmd->parsed()) {
      rep_flags.spec.trace = trace_path;
      const auto spec = finish(rep_flags);
      print_outcome(to_string(spec.algo), run(spec));
    } else if (report_cmd->parsed()) {
      std::filesystem::path p(report_dir);
      if (std::filesystem::is_directory(p)) {
        if (std::filesystem::exists(p / "compare.csv")) {
          p /= "compare.csv";
        } else {
          p /= "metrics.csv";
        }
      }
      std::cout << format_report(read_csv(p));
    } else if (worker_cmd->parsed()) {
      net::serve_worker(net::Endpoint::parse(listen), [](std::uint16_t port) {
        std::printf("listening %u\n", static_cast<unsigned>(port));
        std::fflush(stdout);
      });
    } else if (gen_cmd->parsed()) {
      const auto d = generate(gen_kind, gen_seed, gen_n, gen_m);
      const auto fmt = parse_graph_format(gen_format);
      const auto parent = std::filesystem::path(gen_out).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      if (fmt == GraphFormat::Snap) {
        write_snap(d, std::filesystem::path(gen_out));
      } else {
        write_chaco(d, std::filesystem::path(gen_out));
      }
      write_manifest({d.name, d.vertex_count(), d.edge_count}, gen_out + ".manifest");
      std::printf("%s: %zu vertices, %llu edges\n", gen_out.c_str(), static_cast<std::size_t>(d.vertex_count()),
                  static_cast<unsigned long long>(d.edge_count));
    } else if (trace_cmd->parsed()) {
      auto spec = finish(trace_flags);
      spec.maxcap = 1;  // irrelevant for schedule export
      const auto prep = prepare(spec);
      write_trace(prep.schedule, std::filesystem::path(trace_out));
      std::printf("%s: %zu events, %zu intervals\n", trace_out.c_str(), prep.schedule.events.size(),
                  prep.schedule.interval_marks.size());
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return 0;
}
