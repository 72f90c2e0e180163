#pragma once

#include <cstdint>

#include "sdp/graph_io.hpp"

namespace sdp::synthetic {

// Deterministic graph generators. The stand-ins reproduce the vertex and edge counts of the
// public benchmark graphs so that interval arithmetic and capacity settings line up when the
// original files are not available locally.

/// Triangulated rows x cols grid: 4-neighbour edges, every cell's main diagonal, then
/// seeded anti-diagonals until exactly `edges` edges exist.
Dataset mesh(std::uint32_t rows, std::uint32_t cols, std::uint64_t edges, std::uint64_t seed);

/// Stand-in for the 3elt finite-element mesh: 4200 vertices, 13722 edges.
Dataset mesh_3elt_like(std::uint64_t seed = 3);

/// Co-authorship style graph: vertices grouped in communities, edges formed by small
/// cliques ("papers") inside a community with occasional cross-community members.
/// Every vertex has degree >= 1 and the edge count is exactly `edges`.
Dataset collaboration(std::uint64_t vertices, std::uint64_t edges, std::uint64_t seed);

/// Stand-in for ca-GrQc: 5242 vertices, 14496 edges.
Dataset collaboration_grqc_like(std::uint64_t seed = 5);

/// Two cliques of `clique_size` vertices joined by `bridges` distinct edges.
Dataset two_cliques(std::uint32_t clique_size, std::uint32_t bridges, std::uint64_t seed);

/// Uniform random simple graph with `vertices` vertices and `edges` distinct edges.
Dataset random_graph(std::uint64_t vertices, std::uint64_t edges, std::uint64_t seed);

}  // namespace sdp::synthetic
