#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wdom/error.hpp"

namespace wdom {

/// Internal vertex id, 0-based. Files use 1-based ids.
using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Immutable simple undirected graph with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t vertex_count) : adjacency_(vertex_count) {}

  /// Builds a graph from an edge list. Duplicate edges (in either orientation)
  /// collapse to one; self-loops and out-of-range ids throw ArgumentError.
  static Graph from_edges(std::size_t vertex_count, std::span<const Edge> edges) {
    Graph g(vertex_count);
    for (auto [u, v] : edges) {
      if (u >= vertex_count || v >= vertex_count)
        throw ArgumentError("edge {" + std::to_string(u) + "," + std::to_string(v) +
                            "} references a vertex outside 0.." +
                            std::to_string(vertex_count == 0 ? 0 : vertex_count - 1));
      if (u == v) throw ArgumentError("self-loop on vertex " + std::to_string(u));
      g.adjacency_[u].push_back(v);
      g.adjacency_[v].push_back(u);
    }
    for (auto& list : g.adjacency_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      g.edge_count_ += list.size();
    }
    g.edge_count_ /= 2;
    return g;
  }

  std::size_t vertex_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::span<const Vertex> neighbors(Vertex v) const { return adjacency_[v]; }
  std::size_t degree(Vertex v) const { return adjacency_[v].size(); }

  bool has_edge(Vertex u, Vertex v) const {
    const auto& list = adjacency_[u];
    return std::binary_search(list.begin(), list.end(), v);
  }

  /// Edges as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (Vertex u = 0; u < adjacency_.size(); ++u)
      for (Vertex v : adjacency_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::size_t edge_count_ = 0;
};

enum class GraphFormat { pace_gr, edge_list };

namespace detail {

/// Splits `text` into lines and hands each non-comment line's tokens to `fn`
/// together with its 1-based line number.
template <typename Fn>
void for_each_data_line(std::string_view text, std::string_view comment_prefixes, Fn&& fn) {
  std::size_t line_no = 0;
  std::vector<std::string_view> tokens;
  while (!text.empty()) {
    ++line_no;
    auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    tokens.clear();
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
      if (pos > start) tokens.push_back(line.substr(start, pos - start));
    }
    if (tokens.empty()) continue;
    if (comment_prefixes.find(tokens.front().front()) != std::string_view::npos &&
        tokens.front().size() == 1)
      continue;
    if (tokens.front().front() == '#') continue;
    fn(std::span<const std::string_view>(tokens), line_no);
  }
}

inline std::uint64_t parse_unsigned(std::string_view token, std::size_t line_no) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError("expected a non-negative integer, got '" + std::string(token) + "'",
                     line_no);
  return value;
}

}  // namespace detail

/// Parses a graph in PACE `.gr` format (`p tw n m` header, 1-based edge lines,
/// `c` comments) or as a bare 1-based edge list with n = max id.
inline Graph parse_graph(std::string_view text, GraphFormat format = GraphFormat::pace_gr) {
  std::vector<Edge> edges;
  std::size_t n = 0;
  bool have_header = false;
  std::size_t declared_edges = 0;

  auto read_endpoint = [&](std::string_view token, std::size_t line_no) -> Vertex {
    auto id = detail::parse_unsigned(token, line_no);
    if (id == 0 || (format == GraphFormat::pace_gr && id > n))
      throw ParseError("vertex id " + std::string(token) + " out of range", line_no);
    if (id > UINT32_MAX) throw ParseError("vertex id too large", line_no);
    return static_cast<Vertex>(id - 1);
  };

  detail::for_each_data_line(text, "c", [&](std::span<const std::string_view> tok, std::size_t line_no) {
    if (format == GraphFormat::pace_gr && !have_header) {
      if (tok.size() != 4 || tok[0] != "p" || tok[1] != "tw")
        throw ParseError("malformed header, expected 'p tw <n> <m>'", line_no);
      n = detail::parse_unsigned(tok[2], line_no);
      declared_edges = detail::parse_unsigned(tok[3], line_no);
      have_header = true;
      return;
    }
    if (tok.size() != 2) throw ParseError("expected an edge line 'u v'", line_no);
    Vertex u = read_endpoint(tok[0], line_no);
    Vertex v = read_endpoint(tok[1], line_no);
    if (u == v) throw ParseError("self-loop", line_no);
    if (format == GraphFormat::edge_list) n = std::max<std::size_t>(n, std::max(u, v) + 1);
    edges.emplace_back(u, v);
  });

  if (format == GraphFormat::pace_gr) {
    if (!have_header) throw ParseError("missing 'p tw' header", 0);
    if (edges.size() != declared_edges)
      throw ParseError("header declares " + std::to_string(declared_edges) + " edges but " +
                           std::to_string(edges.size()) + " were read",
                       0);
  }
  return Graph::from_edges(n, edges);
}

/// Serializes to PACE `.gr` with edges in sorted order.
inline std::string write_graph(const Graph& g) {
  std::string out = "p tw " + std::to_string(g.vertex_count()) + " " +
                    std::to_string(g.edge_count()) + "\n";
  for (auto [u, v] : g.edges()) out += std::to_string(u + 1) + " " + std::to_string(v + 1) + "\n";
  return out;
}

}  // namespace wdom
