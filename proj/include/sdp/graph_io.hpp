#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdp/types.hpp"

namespace sdp {

enum class GraphFormat { Snap, Chaco };

GraphFormat parse_graph_format(const std::string& name);
const char* to_string(GraphFormat format);

/// An undirected simple graph with dense vertex ids 0..n-1.
///
/// `adjacency[v]` is the sorted neighbour list of v. `original_ids[v]` is the id v carried
/// in the source file (Chaco ids are 1-based in the file and are kept as such).
struct Dataset {
  std::string name;
  std::vector<std::vector<VertexId>> adjacency;
  std::vector<std::uint64_t> original_ids;
  std::uint64_t edge_count{0};

  std::uint64_t vertex_count() const { return adjacency.size(); }
  const std::vector<VertexId>& neighbors(VertexId v) const { return adjacency.at(v.value); }

  bool operator==(const Dataset&) const = default;
};

/// Builds a normalized Dataset from raw (possibly directed, duplicated, self-looped) pairs
/// over original ids. Vertex ids are remapped densely in ascending original-id order.
Dataset build_dataset(std::string name, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs,
                      std::vector<std::uint64_t> extra_vertices = {});

Dataset parse_edge_list(const std::filesystem::path& path, GraphFormat format);
Dataset parse_snap(std::istream& in, std::string name);
Dataset parse_chaco(std::istream& in, std::string name);

/// Writes "u v" lines (u < v, original ids) preceded by '#' comments.
void write_snap(const Dataset& d, std::ostream& out);
void write_snap(const Dataset& d, const std::filesystem::path& path);

/// Writes the Chaco/METIS form (header "n m", line i = 1-based neighbours of dense vertex i-1).
void write_chaco(const Dataset& d, std::ostream& out);
void write_chaco(const Dataset& d, const std::filesystem::path& path);

/// Key-value manifest ("key = value" or "key: value", '#' comments).
struct DatasetManifest {
  std::string name;
  std::optional<std::uint64_t> vertices;
  std::optional<std::uint64_t> edges;
};

DatasetManifest parse_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(std::istream& in);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// Throws ConfigError naming the first mismatching count.
void validate_against_manifest(const Dataset& d, const DatasetManifest& m);

/// Sum of degrees must equal 2 |E|; neighbour lists sorted, symmetric, loop-free.
bool dataset_is_consistent(const Dataset& d);

struct StreamOrder {
  enum class Kind { FileOrder, Shuffled };
  Kind kind{Kind::FileOrder};
  std::uint64_t seed{0};

  static StreamOrder file_order() { return {}; }
  static StreamOrder shuffled(std::uint64_t seed) { return {Kind::Shuffled, seed}; }
};

/// Dense vertex order used to stream `d` (identity for file order).
std::vector<VertexId> stream_permutation(const Dataset& d, StreamOrder order);

/// One AddVertex per vertex carrying its full adjacency; seq = 0..n-1.
std::vector<GraphEvent> dataset_to_add_events(const Dataset& d, StreamOrder order);

/// FNV-1a of the file contents, used in run manifests.
std::uint64_t file_digest(const std::filesystem::path& path);

}  // namespace sdp
