#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wdom/error.hpp"
#include "wdom/graph.hpp"
#include "wdom/tree_decomposition.hpp"

namespace wdom {

namespace detail {

// Distribution helpers with fixed algorithms, so a seed means the same graph
// on every standard library.
inline double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t size) { return rng() % size; }

}  // namespace detail

/// A partial k-tree together with the width-k decomposition its construction
/// induces.
struct PartialKTree {
  Graph graph;
  TreeDecomposition construction;
};

/// Builds a k-tree by repeatedly attaching a new vertex to a uniformly chosen
/// k-clique (starting from K_{k+1}), then keeps each edge independently with
/// probability `keep_prob`.
inline PartialKTree random_partial_ktree_with_decomposition(std::size_t n, std::size_t k, double keep_prob,
                                                            std::uint64_t seed) {
  if (k == 0 || k >= n) throw ArgumentError("random_partial_ktree requires 0 < k < n");
  if (!(keep_prob >= 0.0 && keep_prob <= 1.0)) throw ArgumentError("keep_prob must lie in [0,1]");

  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  TreeDecomposition td;
  td.vertex_count = n;

  // Every k-clique is stored with the construction bag that contains it.
  std::vector<std::vector<Vertex>> cliques;
  std::vector<NodeId> clique_bag;

  Bag base(k + 1);
  for (Vertex v = 0; v <= k; ++v) {
    base[v] = v;
    for (Vertex u = 0; u < v; ++u) edges.emplace_back(u, v);
  }
  td.bags.push_back(base);
  for (std::size_t skip = 0; skip <= k; ++skip) {
    std::vector<Vertex> c;
    for (Vertex v = 0; v <= k; ++v)
      if (v != skip) c.push_back(v);
    cliques.push_back(std::move(c));
    clique_bag.push_back(0);
  }

  for (Vertex v = static_cast<Vertex>(k + 1); v < n; ++v) {
    std::size_t pick = detail::uniform_index(rng, cliques.size());
    std::vector<Vertex> clique = cliques[pick];
    NodeId parent = clique_bag[pick];

    for (Vertex u : clique) edges.emplace_back(u, v);
    Bag bag = clique;
    bag.push_back(v);  // v is the largest id so far
    NodeId node = td.bags.size();
    td.bags.push_back(bag);
    td.edges.emplace_back(parent, node);

    for (std::size_t drop = 0; drop < clique.size(); ++drop) {
      std::vector<Vertex> c;
      for (std::size_t i = 0; i < clique.size(); ++i)
        if (i != drop) c.push_back(clique[i]);
      c.push_back(v);
      cliques.push_back(std::move(c));
      clique_bag.push_back(node);
    }
  }

  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (const auto& e : edges)
    if (keep_prob >= 1.0 || detail::unit_double(rng) < keep_prob) kept.push_back(e);

  return {Graph::from_edges(n, kept), std::move(td)};
}

inline Graph random_partial_ktree(std::size_t n, std::size_t k, double keep_prob, std::uint64_t seed) {
  return random_partial_ktree_with_decomposition(n, k, keep_prob, seed).graph;
}

/// Erdos-Renyi G(n, p).
inline Graph random_gnp(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (detail::unit_double(rng) < p) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

}  // namespace wdom
