#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "wdom/error.hpp"
#include "wdom/graph.hpp"
#include "wdom/validation.hpp"

namespace wdom {

using NodeId = std::size_t;
using Bag = std::vector<Vertex>;  // kept sorted ascending

/// A tree of bags over the vertices of a graph. Nothing here enforces validity;
/// use validate_td.
struct TreeDecomposition {
  std::size_t vertex_count = 0;
  std::vector<Bag> bags;
  std::vector<std::pair<NodeId, NodeId>> edges;

  std::size_t node_count() const noexcept { return bags.size(); }

  /// Max bag size minus one; -1 for a decomposition without nodes.
  long width() const noexcept {
    long best = -1;
    for (const auto& b : bags) best = std::max(best, static_cast<long>(b.size()) - 1);
    return best;
  }

  friend bool operator==(const TreeDecomposition&, const TreeDecomposition&) = default;
};

/// The trivial decomposition: a single bag holding every vertex.
inline TreeDecomposition single_bag_decomposition(const Graph& g) {
  TreeDecomposition td;
  td.vertex_count = g.vertex_count();
  Bag all(g.vertex_count());
  std::iota(all.begin(), all.end(), Vertex{0});
  td.bags.push_back(std::move(all));
  return td;
}

/// Checks tree shape, vertex coverage, edge coverage and connectivity of every
/// B^-1(v). Vertex ids in messages are 0-based.
inline ValidationReport validate_td(const Graph& g, const TreeDecomposition& td) {
  ValidationReport report;
  const std::size_t nodes = td.node_count();
  const std::size_t n = g.vertex_count();

  if (td.vertex_count != n)
    report.add("vertex count mismatch: decomposition has " + std::to_string(td.vertex_count) +
               ", graph has " + std::to_string(n));

  // Tree shape.
  std::vector<std::vector<NodeId>> adj(nodes);
  bool edges_in_range = true;
  for (auto [a, b] : td.edges) {
    if (a >= nodes || b >= nodes || a == b) {
      report.add("tree edge {" + std::to_string(a) + "," + std::to_string(b) + "} is invalid");
      edges_in_range = false;
      continue;
    }
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  if (nodes == 0) {
    if (n != 0) report.add("empty decomposition for a nonempty graph");
  } else {
    std::vector<char> seen(nodes, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      NodeId t = stack.back();
      stack.pop_back();
      for (NodeId s : adj[t])
        if (!seen[s]) {
          seen[s] = 1;
          ++reached;
          stack.push_back(s);
        }
    }
    if (!edges_in_range || reached != nodes || td.edges.size() != nodes - 1) report.add("not a tree");
  }

  // Bag contents and B^-1(v).
  std::vector<std::vector<NodeId>> occurrences(n);
  for (NodeId t = 0; t < nodes; ++t) {
    const auto& bag = td.bags[t];
    if (!std::is_sorted(bag.begin(), bag.end()) ||
        std::adjacent_find(bag.begin(), bag.end()) != bag.end())
      report.add("bag " + std::to_string(t) + " is not a sorted set");
    for (Vertex v : bag) {
      if (v >= n) {
        report.add("bag " + std::to_string(t) + " contains unknown vertex " + std::to_string(v));
        continue;
      }
      occurrences[v].push_back(t);
    }
  }

  auto bag_contains = [&](NodeId t, Vertex v) {
    return std::binary_search(td.bags[t].begin(), td.bags[t].end(), v);
  };

  for (Vertex v = 0; v < n; ++v) {
    const auto& occ = occurrences[v];
    if (occ.empty()) {
      report.add("vertex " + std::to_string(v) + " appears in no bag");
      continue;
    }
    std::unordered_set<NodeId> seen{occ.front()};
    std::vector<NodeId> stack{occ.front()};
    while (!stack.empty()) {
      NodeId t = stack.back();
      stack.pop_back();
      for (NodeId s : adj[t])
        if (!seen.count(s) && bag_contains(s, v)) {
          seen.insert(s);
          stack.push_back(s);
        }
    }
    if (seen.size() != occ.size())
      report.add("bags containing vertex " + std::to_string(v) + " are not connected");
  }

  std::unordered_set<std::uint64_t> covered;
  for (const auto& bag : td.bags)
    for (std::size_t i = 0; i < bag.size(); ++i)
      for (std::size_t j = i + 1; j < bag.size(); ++j)
        covered.insert((std::uint64_t{bag[i]} << 32) | bag[j]);
  for (auto [u, v] : g.edges())
    if (!covered.count((std::uint64_t{u} << 32) | v))
      report.add("edge {" + std::to_string(u) + "," + std::to_string(v) + "} uncovered");

  return report;
}

enum class EliminationMethod { min_fill, min_degree };

namespace detail {

/// Elimination graph supporting min-degree / min-fill orderings.
class EliminationGraph {
 public:
  explicit EliminationGraph(const Graph& g) : adj_(g.vertex_count()) {
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      auto nb = g.neighbors(v);
      adj_[v].assign(nb.begin(), nb.end());
    }
  }

  const std::vector<Vertex>& neighbors(Vertex v) const { return adj_[v]; }

  bool adjacent(Vertex a, Vertex b) const {
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
  }

  std::size_t fill_in(Vertex v) const {
    const auto& nb = adj_[v];
    std::size_t missing = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      // Count neighbors of v after nb[i] that are not adjacent to nb[i].
      const auto& other = adj_[nb[i]];
      std::size_t common = 0;
      auto it = std::upper_bound(nb.begin(), nb.end(), nb[i]);
      auto jt = std::upper_bound(other.begin(), other.end(), nb[i]);
      while (it != nb.end() && jt != other.end()) {
        if (*it < *jt) ++it;
        else if (*jt < *it) ++jt;
        else { ++common; ++it; ++jt; }
      }
      missing += static_cast<std::size_t>(nb.end() - std::upper_bound(nb.begin(), nb.end(), nb[i])) - common;
    }
    return missing;
  }

  /// Removes v, turning its neighborhood into a clique. Returns the old neighborhood.
  std::vector<Vertex> eliminate(Vertex v) {
    std::vector<Vertex> nb = std::move(adj_[v]);
    adj_[v].clear();
    std::vector<Vertex> merged;
    for (Vertex u : nb) {
      auto& list = adj_[u];
      list.erase(std::lower_bound(list.begin(), list.end(), v));
      merged.clear();
      std::set_union(list.begin(), list.end(), nb.begin(), nb.end(), std::back_inserter(merged));
      merged.erase(std::lower_bound(merged.begin(), merged.end(), u));
      list.swap(merged);
    }
    return nb;
  }

 private:
  std::vector<std::vector<Vertex>> adj_;
};

}  // namespace detail

/// Greedy elimination ordering. Ties go to the smallest vertex id.
inline std::vector<Vertex> elimination_order(const Graph& g, EliminationMethod method) {
  const std::size_t n = g.vertex_count();
  detail::EliminationGraph eg(g);
  auto score = [&](Vertex v) {
    return method == EliminationMethod::min_degree ? eg.neighbors(v).size() : eg.fill_in(v);
  };

  std::vector<std::size_t> key(n);
  std::set<std::pair<std::size_t, Vertex>> queue;
  for (Vertex v = 0; v < n; ++v) {
    key[v] = score(v);
    queue.emplace(key[v], v);
  }

  std::vector<char> eliminated(n, 0);
  std::vector<Vertex> order;
  order.reserve(n);
  std::vector<Vertex> touched;
  while (!queue.empty()) {
    Vertex v = queue.begin()->second;
    queue.erase(queue.begin());
    eliminated[v] = 1;
    order.push_back(v);
    auto nb = eg.eliminate(v);

    touched.assign(nb.begin(), nb.end());
    if (method == EliminationMethod::min_fill) {
      // Fill-in can change for anything adjacent to the new clique.
      for (Vertex u : nb) {
        const auto& second = eg.neighbors(u);
        touched.insert(touched.end(), second.begin(), second.end());
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    }
    for (Vertex u : touched) {
      if (eliminated[u]) continue;
      std::size_t s = score(u);
      if (s == key[u]) continue;
      queue.erase({key[u], u});
      key[u] = s;
      queue.emplace(s, u);
    }
  }
  return order;
}

/// Tree decomposition induced by an elimination order: one bag per vertex
/// (the vertex plus its neighborhood at elimination time), attached to the
/// bag of its earliest-eliminated neighbor. Components are chained together.
inline TreeDecomposition decomposition_from_order(const Graph& g, std::span<const Vertex> order) {
  const std::size_t n = g.vertex_count();
  if (order.size() != n) throw ArgumentError("elimination order must list every vertex once");
  std::vector<std::size_t> position(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] >= n || position[order[i]] != n)
      throw ArgumentError("elimination order must list every vertex once");
    position[order[i]] = i;
  }

  TreeDecomposition td;
  td.vertex_count = n;
  td.bags.resize(n);
  detail::EliminationGraph eg(g);
  std::optional<NodeId> previous_root;
  for (std::size_t i = 0; i < n; ++i) {
    Vertex v = order[i];
    auto nb = eg.eliminate(v);
    Bag bag = nb;
    bag.insert(std::lower_bound(bag.begin(), bag.end(), v), v);
    td.bags[i] = std::move(bag);
    if (nb.empty()) {
      if (previous_root) td.edges.emplace_back(*previous_root, i);
      previous_root = i;
    } else {
      std::size_t parent = n;
      for (Vertex u : nb) parent = std::min(parent, position[u]);
      td.edges.emplace_back(i, parent);
    }
  }
  return td;
}

inline TreeDecomposition decompose(const Graph& g, EliminationMethod method = EliminationMethod::min_fill) {
  auto order = elimination_order(g, method);
  return decomposition_from_order(g, order);
}

/// Parses the PACE `.td` format: `s td N W+1 n`, then `b i v...` lines and
/// tree edges `i j`, all 1-based.
inline TreeDecomposition parse_td(std::string_view text) {
  TreeDecomposition td;
  bool have_header = false;
  std::size_t declared_bags = 0, declared_max = 0;
  std::vector<char> bag_seen;

  detail::for_each_data_line(text, "c", [&](std::span<const std::string_view> tok, std::size_t line_no) {
    if (!have_header) {
      if (tok.size() != 5 || tok[0] != "s" || tok[1] != "td")
        throw ParseError("malformed header, expected 's td <N> <W+1> <n>'", line_no);
      declared_bags = detail::parse_unsigned(tok[2], line_no);
      declared_max = detail::parse_unsigned(tok[3], line_no);
      td.vertex_count = detail::parse_unsigned(tok[4], line_no);
      td.bags.resize(declared_bags);
      bag_seen.assign(declared_bags, 0);
      have_header = true;
      return;
    }
    if (tok[0] == "b") {
      if (tok.size() < 2) throw ParseError("bag line without index", line_no);
      auto index = detail::parse_unsigned(tok[1], line_no);
      if (index == 0 || index > declared_bags)
        throw ParseError("bag index " + std::string(tok[1]) + " out of range", line_no);
      if (bag_seen[index - 1]) throw ParseError("bag " + std::string(tok[1]) + " defined twice", line_no);
      bag_seen[index - 1] = 1;
      Bag bag;
      for (std::size_t i = 2; i < tok.size(); ++i) {
        auto v = detail::parse_unsigned(tok[i], line_no);
        if (v == 0 || v > td.vertex_count)
          throw ParseError("vertex id " + std::string(tok[i]) + " out of range", line_no);
        bag.push_back(static_cast<Vertex>(v - 1));
      }
      std::sort(bag.begin(), bag.end());
      bag.erase(std::unique(bag.begin(), bag.end()), bag.end());
      td.bags[index - 1] = std::move(bag);
      return;
    }
    if (tok.size() != 2) throw ParseError("expected a tree edge 'i j'", line_no);
    auto a = detail::parse_unsigned(tok[0], line_no);
    auto b = detail::parse_unsigned(tok[1], line_no);
    if (a == 0 || a > declared_bags || b == 0 || b > declared_bags)
      throw ParseError("bag index out of range in tree edge", line_no);
    td.edges.emplace_back(a - 1, b - 1);
  });

  if (!have_header) throw ParseError("missing 's td' header", 0);
  for (std::size_t i = 0; i < declared_bags; ++i)
    if (!bag_seen[i]) throw ParseError("header declares " + std::to_string(declared_bags) +
                                           " bags but bag " + std::to_string(i + 1) + " is missing",
                                       0);
  if (static_cast<long>(declared_max) != td.width() + 1)
    throw ParseError("header declares max bag size " + std::to_string(declared_max) + " but the largest bag has " +
                         std::to_string(td.width() + 1) + " vertices",
                     0);
  return td;
}

inline std::string write_td(const TreeDecomposition& td) {
  std::string out = "s td " + std::to_string(td.node_count()) + " " + std::to_string(td.width() + 1) + " " +
                    std::to_string(td.vertex_count) + "\n";
  for (NodeId t = 0; t < td.node_count(); ++t) {
    out += "b " + std::to_string(t + 1);
    for (Vertex v : td.bags[t]) out += " " + std::to_string(v + 1);
    out += "\n";
  }
  for (auto [a, b] : td.edges) out += std::to_string(a + 1) + " " + std::to_string(b + 1) + "\n";
  return out;
}

}  // namespace wdom
