#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "sdp/run.hpp"

using namespace sdp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("sdp_run_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string drop_elapsed(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST(RunSpec, Validation) {
  RunSpec spec;
  EXPECT_THROW(run(spec), ConfigError);  // no dataset
  spec.dataset = "synthetic:nope";
  EXPECT_THROW(run(spec), ConfigError);
  EXPECT_EQ(parse_run_mode("distributed"), RunMode::Distributed);
  EXPECT_THROW(parse_run_mode("cluster"), ConfigError);
}

TEST(Run, MaxcapDerivedFromEdgeCount) {
  RunSpec spec;
  spec.dataset = "synthetic:3elt";
  const auto prep = prepare(spec);
  EXPECT_EQ(prep.maxcap, (12 * 13722 + 10 * 4 - 1) / (10 * 4));
}

TEST(Run, DeterministicOutputs) {
  RunSpec spec;
  spec.dataset = "synthetic:grqc";
  spec.seed = 9;
  const auto a = scratch("a"), b = scratch("b");
  spec.out = a;
  const auto ra = run(spec);
  spec.out = b;
  const auto rb = run(spec);
  EXPECT_EQ(ra.placement, rb.placement);
  EXPECT_EQ(ra.series.size(), 4u);
  for (const auto* f : {"assignments.csv", "scaling.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(drop_elapsed(slurp(a / "metrics.csv")), drop_elapsed(slurp(b / "metrics.csv")));
  EXPECT_TRUE(fs::exists(a / "manifest.txt"));
  spec.seed = 10;
  spec.out.reset();
  EXPECT_NE(run(spec).placement, ra.placement);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Run, CompareJoinsEveryInterval) {
  RunSpec spec;
  spec.dataset = "synthetic:3elt";
  const auto dir = scratch("cmp");
  spec.out = dir;
  const auto c = compare(spec, {Algorithm::Sdp, Algorithm::Hash, Algorithm::Ldg});
  ASSERT_EQ(c.runs.size(), 3u);
  ASSERT_EQ(c.merged.size(), 12u);
  const auto k = c.runs.at("sdp").final_partitions;
  EXPECT_EQ(c.runs.at("hash").final_partitions, k);
  EXPECT_EQ(c.runs.at("ldg").final_partitions, k);
  for (const auto* algo : {"sdp", "hash", "ldg"}) EXPECT_TRUE(fs::exists(dir / algo / "metrics.csv"));
  EXPECT_EQ(read_csv(dir / "compare.csv").size(), 12u);
  const auto report = format_report(c.merged);
  EXPECT_NE(report.find("hash"), std::string::npos);
  EXPECT_NE(report.find("ldg"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Run, DistributedThreadsMatchInProcess) {
  RunSpec spec;
  spec.dataset = "synthetic:3elt";
  spec.maxcap = 2500;
  spec.workers = 8;
  spec.seed = 4;
  const auto local = run(spec);
  spec.mode = RunMode::Distributed;
  const auto dist = run(spec);
  EXPECT_EQ(dist.placement, local.placement);
  ASSERT_TRUE(dist.shard_placement);
  EXPECT_EQ(*dist.shard_placement, dist.placement);
  EXPECT_EQ(dist.shard_diff, "");
  EXPECT_GT(dist.messages, 0u);
  EXPECT_GT(dist.migrations, 0u);
}

TEST(Run, TraceReplayMatchesDatasetRun) {
  RunSpec spec;
  spec.dataset = "synthetic:grqc";
  spec.maxcap = 4000;
  const auto prep = prepare(spec);
  const auto path = scratch("trace.jsonl");
  write_trace(prep.schedule, path);
  RunSpec replayed = spec;
  replayed.dataset.clear();
  replayed.trace = path;
  EXPECT_EQ(run(replayed).placement, run(spec).placement);
  fs::remove(path);
}
