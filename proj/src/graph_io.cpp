#include "sdp/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "sdp/random.hpp"

namespace sdp {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<std::uint64_t> to_u64(std::string_view tok) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

std::uint64_t require_u64(std::string_view tok, std::size_t line_no) {
  const auto v = to_u64(tok);
  if (!v) throw ParseError("expected a non-negative integer, got '" + std::string(tok) + "'", line_no);
  return *v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

GraphFormat parse_graph_format(const std::string& name) {
  if (name == "snap") return GraphFormat::Snap;
  if (name == "chaco" || name == "metis") return GraphFormat::Chaco;
  throw ConfigError("unknown graph format '" + name + "' (expected snap or chaco)");
}

const char* to_string(GraphFormat format) { return format == GraphFormat::Snap ? "snap" : "chaco"; }

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::AddVertex:
      return "add";
    case EventKind::DeleteVertex:
      return "delv";
    case EventKind::DeleteEdge:
      return "dele";
  }
  return "?";
}

Dataset build_dataset(std::string name, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs,
                      std::vector<std::uint64_t> extra_vertices) {
  std::vector<std::uint64_t> ids = std::move(extra_vertices);
  ids.reserve(ids.size() + 2 * pairs.size());
  for (const auto& [a, b] : pairs) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::unordered_map<std::uint64_t, std::uint64_t> dense;
  dense.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) dense.emplace(ids[i], i);

  Dataset d;
  d.name = std::move(name);
  d.original_ids = std::move(ids);
  d.adjacency.assign(d.original_ids.size(), {});
  for (const auto& [a, b] : pairs) {
    if (a == b) continue;
    const auto u = dense.at(a);
    const auto w = dense.at(b);
    d.adjacency[u].push_back(VertexId{w});
    d.adjacency[w].push_back(VertexId{u});
  }
  std::uint64_t degree_sum = 0;
  for (auto& nbrs : d.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    degree_sum += nbrs.size();
  }
  d.edge_count = degree_sum / 2;
  return d;
}

Dataset parse_snap(std::istream& in, std::string name) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#' || toks[0].front() == '%') continue;
    if (toks.size() != 2) throw ParseError("expected two vertex ids per line", line_no);
    pairs.emplace_back(require_u64(toks[0], line_no), require_u64(toks[1], line_no));
  }
  if (pairs.empty()) throw ParseError("edge list contains no edges", 0);
  return build_dataset(std::move(name), pairs);
}

Dataset parse_chaco(std::istream& in, std::string name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '%') continue;
    header_line = line;
    header = split_ws(header_line);
    break;
  }
  if (header.empty()) throw ParseError("graph file is empty", 0);
  if (header.size() < 2 || header.size() > 4) throw ParseError("header must be 'n m [fmt [ncon]]'", line_no);
  const auto n = require_u64(header[0], line_no);
  const auto m = require_u64(header[1], line_no);
  std::string fmt = header.size() >= 3 ? std::string(header[2]) : "0";
  if (fmt.size() > 3 || fmt.find_first_not_of("01") != std::string::npos)
    throw ParseError("unsupported fmt field '" + fmt + "'", line_no);
  fmt.insert(0, 3 - fmt.size(), '0');
  const bool has_vsize = fmt[0] == '1';
  const bool has_vwgt = fmt[1] == '1';
  const bool has_ewgt = fmt[2] == '1';
  const std::uint64_t ncon = header.size() == 4 ? require_u64(header[3], line_no) : 1;
  if (n == 0) throw ParseError("graph declares zero vertices", line_no);

  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::vector<std::uint64_t> all_vertices(n);
  for (std::uint64_t i = 0; i < n; ++i) all_vertices[i] = i + 1;

  std::uint64_t vertex = 0;
  while (vertex < n && std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (!toks.empty() && toks[0].front() == '%') continue;
    ++vertex;
    std::size_t pos = 0;
    if (has_vsize) ++pos;
    if (has_vwgt) pos += ncon;
    if (pos > toks.size()) throw ParseError("missing vertex size/weight fields", line_no);
    const std::size_t stride = has_ewgt ? 2 : 1;
    if ((toks.size() - pos) % stride != 0) throw ParseError("dangling edge weight", line_no);
    for (; pos < toks.size(); pos += stride) {
      const auto nbr = require_u64(toks[pos], line_no);
      if (nbr == 0 || nbr > n) throw ParseError("neighbour id " + std::to_string(nbr) + " out of range", line_no);
      pairs.emplace_back(vertex, nbr);
    }
  }
  if (vertex != n)
    throw ParseError("expected " + std::to_string(n) + " adjacency lines, found " + std::to_string(vertex), line_no);
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = split_ws(line);
    if (!toks.empty() && toks[0].front() != '%') throw ParseError("trailing data after last vertex", line_no);
  }
  Dataset d = build_dataset(std::move(name), pairs, std::move(all_vertices));
  if (d.edge_count != m)
    throw ParseError("header declares " + std::to_string(m) + " edges, adjacency holds " +
                         std::to_string(d.edge_count),
                     0);
  return d;
}

Dataset parse_edge_list(const std::filesystem::path& path, GraphFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file '" + path.string() + "'");
  auto name = path.stem().string();
  return format == GraphFormat::Snap ? parse_snap(in, std::move(name)) : parse_chaco(in, std::move(name));
}

void write_snap(const Dataset& d, std::ostream& out) {
  out << "# " << (d.name.empty() ? "graph" : d.name) << "\n";
  out << "# Nodes: " << d.vertex_count() << " Edges: " << d.edge_count << "\n";
  for (std::size_t u = 0; u < d.adjacency.size(); ++u) {
    for (const auto w : d.adjacency[u]) {
      if (u < w.value) out << d.original_ids[u] << ' ' << d.original_ids[w.value] << '\n';
    }
  }
}

void write_snap(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_snap(d, out);
}

void write_chaco(const Dataset& d, std::ostream& out) {
  out << d.vertex_count() << ' ' << d.edge_count << '\n';
  for (const auto& nbrs : d.adjacency) {
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (i) out << ' ';
      out << nbrs[i].value + 1;
    }
    out << '\n';
  }
}

void write_chaco(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_chaco(d, out);
}

DatasetManifest parse_manifest(std::istream& in) {
  DatasetManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto sep = t.find_first_of("=:");
    if (sep == std::string::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = trim(std::string_view(t).substr(0, sep));
    const auto value = trim(std::string_view(t).substr(sep + 1));
    if (key == "name") {
      m.name = value;
    } else if (key == "vertices") {
      m.vertices = require_u64(value, line_no);
    } else if (key == "edges") {
      m.edges = require_u64(value, line_no);
    } else {
      throw ParseError("unknown manifest key '" + key + "'", line_no);
    }
  }
  return m;
}

DatasetManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest '" + path.string() + "'");
  return parse_manifest(in);
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "name = " << m.name << '\n';
  if (m.vertices) out << "vertices = " << *m.vertices << '\n';
  if (m.edges) out << "edges = " << *m.edges << '\n';
}

void validate_against_manifest(const Dataset& d, const DatasetManifest& m) {
  if (m.vertices && *m.vertices != d.vertex_count())
    throw ConfigError("manifest expects " + std::to_string(*m.vertices) + " vertices, dataset has " +
                      std::to_string(d.vertex_count()));
  if (m.edges && *m.edges != d.edge_count)
    throw ConfigError("manifest expects " + std::to_string(*m.edges) + " edges, dataset has " +
                      std::to_string(d.edge_count));
}

bool dataset_is_consistent(const Dataset& d) {
  std::uint64_t degree_sum = 0;
  for (std::size_t u = 0; u < d.adjacency.size(); ++u) {
    const auto& nbrs = d.adjacency[u];
    if (!std::is_sorted(nbrs.begin(), nbrs.end())) return false;
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) return false;
    for (const auto w : nbrs) {
      if (w.value == u || w.value >= d.adjacency.size()) return false;
      const auto& back = d.adjacency[w.value];
      if (!std::binary_search(back.begin(), back.end(), VertexId{u})) return false;
    }
    degree_sum += nbrs.size();
  }
  return degree_sum == 2 * d.edge_count && d.original_ids.size() == d.adjacency.size();
}

std::vector<VertexId> stream_permutation(const Dataset& d, StreamOrder order) {
  std::vector<VertexId> perm(d.vertex_count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = VertexId{i};
  if (order.kind == StreamOrder::Kind::Shuffled) {
    Rng rng(order.seed);
    rng.shuffle(std::span<VertexId>(perm));
  }
  return perm;
}

std::vector<GraphEvent> dataset_to_add_events(const Dataset& d, StreamOrder order) {
  std::vector<GraphEvent> events;
  events.reserve(d.vertex_count());
  std::uint64_t seq = 0;
  for (const auto v : stream_permutation(d, order)) events.push_back(GraphEvent::add(seq++, v, d.neighbors(v)));
  return events;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::string contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(contents);
}

}  // namespace sdp
