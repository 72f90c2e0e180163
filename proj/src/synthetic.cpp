#include "sdp/synthetic.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "sdp/random.hpp"

namespace sdp::synthetic {
namespace {

using PairList = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

class EdgeSet {
 public:
  bool insert(std::uint64_t a, std::uint64_t b) {
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    if (!seen_.emplace(a, b).second) return false;
    pairs_.emplace_back(a, b);
    return true;
  }
  std::size_t size() const { return pairs_.size(); }
  const PairList& pairs() const { return pairs_; }

 private:
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen_;
  PairList pairs_;
};

}  // namespace

Dataset mesh(std::uint32_t rows, std::uint32_t cols, std::uint64_t edges, std::uint64_t seed) {
  if (rows < 2 || cols < 2) throw ConfigError("mesh needs at least 2x2 vertices");
  const auto id = [cols](std::uint64_t r, std::uint64_t c) { return r * cols + c; };
  EdgeSet set;
  for (std::uint32_t r = 0; r < rows; ++r) {
    for (std::uint32_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) set.insert(id(r, c), id(r, c + 1));
      if (r + 1 < rows) set.insert(id(r, c), id(r + 1, c));
    }
  }
  for (std::uint32_t r = 0; r + 1 < rows; ++r)
    for (std::uint32_t c = 0; c + 1 < cols; ++c) set.insert(id(r, c), id(r + 1, c + 1));

  PairList anti;
  for (std::uint32_t r = 0; r + 1 < rows; ++r)
    for (std::uint32_t c = 0; c + 1 < cols; ++c) anti.emplace_back(id(r, c + 1), id(r + 1, c));
  if (edges < set.size() || edges > set.size() + anti.size())
    throw ConfigError("mesh edge target out of range for the requested grid");
  Rng rng(seed);
  rng.shuffle(std::span(anti));
  for (std::size_t i = 0; set.size() < edges; ++i) set.insert(anti[i].first, anti[i].second);

  std::vector<std::uint64_t> all(static_cast<std::size_t>(rows) * cols);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return build_dataset("mesh", set.pairs(), std::move(all));
}

Dataset mesh_3elt_like(std::uint64_t seed) {
  Dataset d = mesh(60, 70, 13722, seed);
  d.name = "3elt-synthetic";
  return d;
}

Dataset collaboration(std::uint64_t vertices, std::uint64_t edges, std::uint64_t seed) {
  if (vertices < 4) throw ConfigError("collaboration graph needs at least 4 vertices");
  Rng rng(seed);

  // Communities of 8..40 consecutive members of a shuffled vertex order.
  std::vector<std::uint64_t> order(vertices);
  for (std::uint64_t i = 0; i < vertices; ++i) order[i] = i;
  rng.shuffle(std::span(order));
  std::vector<std::vector<std::uint64_t>> communities;
  std::vector<std::size_t> community_of(vertices);
  for (std::size_t pos = 0; pos < order.size();) {
    const std::size_t size = std::min<std::size_t>(8 + rng.below(33), order.size() - pos);
    std::vector<std::uint64_t> members(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                       order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    for (const auto v : members) community_of[v] = communities.size();
    communities.push_back(std::move(members));
    pos += size;
  }
  if (communities.size() > 1 && communities.back().size() < 2) {
    const auto v = communities.back().front();
    communities.pop_back();
    communities.back().push_back(v);
    community_of[v] = communities.size() - 1;
  }

  EdgeSet set;
  const auto pick_coauthor = [&](std::size_t community) {
    if (rng.below(100) < 6) return rng.below(vertices);
    const auto& members = communities[community];
    return members[rng.below(members.size())];
  };
  const auto add_paper = [&](std::uint64_t lead, std::size_t authors, bool stop_at_target) {
    std::vector<std::uint64_t> team{lead};
    for (std::size_t tries = 0; team.size() < authors && tries < 4 * authors; ++tries) {
      const auto a = pick_coauthor(community_of[lead]);
      if (std::find(team.begin(), team.end(), a) == team.end()) team.push_back(a);
    }
    for (std::size_t i = 0; i < team.size(); ++i) {
      for (std::size_t j = i + 1; j < team.size(); ++j) {
        if (stop_at_target && set.size() >= edges) return team;
        set.insert(team[i], team[j]);
      }
    }
    return team;
  };
  const auto team_size = [&] {
    const auto r = rng.below(100);
    return r < 45 ? 2u : r < 75 ? 3u : r < 92 ? 4u : 5u + static_cast<unsigned>(rng.below(3));
  };

  // Every vertex authors at least one paper.
  std::vector<bool> covered(vertices, false);
  for (const auto v : order) {
    if (covered[v]) continue;
    const auto team = add_paper(v, 2, false);
    if (team.size() < 2) throw ConfigError("could not find a co-author for a vertex");
    for (const auto a : team) covered[a] = true;
  }
  if (set.size() > edges) throw ConfigError("edge target too small to cover every vertex");
  while (set.size() < edges) add_paper(rng.below(vertices), team_size(), true);

  Dataset d = build_dataset("collaboration", set.pairs());
  if (d.vertex_count() != vertices) throw ConfigError("collaboration generator left isolated vertices");
  return d;
}

Dataset collaboration_grqc_like(std::uint64_t seed) {
  Dataset d = collaboration(5242, 14496, seed);
  d.name = "grqc-synthetic";
  return d;
}

Dataset two_cliques(std::uint32_t clique_size, std::uint32_t bridges, std::uint64_t seed) {
  if (clique_size < 2) throw ConfigError("clique size must be at least 2");
  if (static_cast<std::uint64_t>(bridges) > static_cast<std::uint64_t>(clique_size) * clique_size)
    throw ConfigError("too many bridges");
  EdgeSet set;
  for (std::uint32_t half = 0; half < 2; ++half) {
    const std::uint64_t base = static_cast<std::uint64_t>(half) * clique_size;
    for (std::uint64_t i = 0; i < clique_size; ++i)
      for (std::uint64_t j = i + 1; j < clique_size; ++j) set.insert(base + i, base + j);
  }
  Rng rng(seed);
  std::size_t added = 0;
  while (added < bridges) {
    if (set.insert(rng.below(clique_size), clique_size + rng.below(clique_size))) ++added;
  }
  Dataset d = build_dataset("two-cliques", set.pairs());
  return d;
}

Dataset random_graph(std::uint64_t vertices, std::uint64_t edges, std::uint64_t seed) {
  if (vertices < 2) throw ConfigError("random graph needs at least 2 vertices");
  if (edges > vertices * (vertices - 1) / 2) throw ConfigError("too many edges for a simple graph");
  Rng rng(seed);
  EdgeSet set;
  while (set.size() < edges) set.insert(rng.below(vertices), rng.below(vertices));
  std::vector<std::uint64_t> all(vertices);
  for (std::uint64_t i = 0; i < vertices; ++i) all[i] = i;
  Dataset d = build_dataset("random", set.pairs(), std::move(all));
  return d;
}

}  // namespace sdp::synthetic
