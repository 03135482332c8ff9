#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdom/error.hpp"
#include "wdom/graph.hpp"

namespace wdom {

inline constexpr std::size_t kMaxBruteWdsVertices = 20;
inline constexpr std::size_t kMaxBruteLmaxVertices = 16;

namespace detail {

inline std::vector<char> membership(const Graph& g, std::span<const Vertex> set) {
  std::vector<char> in(g.vertex_count(), 0);
  for (Vertex v : set) {
    if (v >= g.vertex_count()) throw ArgumentError("vertex " + std::to_string(v) + " is not in the graph");
    in[v] = 1;
  }
  return in;
}

inline std::vector<std::uint32_t> neighbor_masks(const Graph& g) {
  std::vector<std::uint32_t> masks(g.vertex_count(), 0);
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    for (Vertex u : g.neighbors(v)) masks[v] |= std::uint32_t{1} << u;
  return masks;
}

inline std::vector<Vertex> mask_to_set(std::uint32_t mask) {
  std::vector<Vertex> out;
  for (Vertex v = 0; mask; ++v, mask >>= 1)
    if (mask & 1) out.push_back(v);
  return out;
}

/// Visits the k-subsets of {0..n-1} in lexicographic order as bitmasks until fn
/// returns false. Returns false if stopped early.
template <typename Fn>
bool for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::uint32_t mask = 0;
    for (std::size_t i : idx) mask |= std::uint32_t{1} << i;
    if (!fn(mask)) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// True iff every vertex outside S has at least w neighbors in S.
inline bool is_w_dominating(const Graph& g, std::span<const Vertex> set, unsigned w) {
  auto in = detail::membership(g, set);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (in[v]) continue;
    unsigned count = 0;
    for (Vertex u : g.neighbors(v)) count += in[u];
    if (count < w) return false;
  }
  return true;
}

/// |S| + |{v not in S : v has >= w neighbors in S}|.
inline std::size_t lmax_value(const Graph& g, std::span<const Vertex> set, unsigned w) {
  auto in = detail::membership(g, set);
  std::size_t value = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (in[v]) {
      ++value;
      continue;
    }
    unsigned count = 0;
    for (Vertex u : g.neighbors(v)) count += in[u];
    value += count >= w;
  }
  return value;
}

struct BruteResult {
  std::size_t value = 0;
  std::vector<Vertex> set;
};

/// Minimum w-dominating set by enumeration in increasing cardinality; the
/// lexicographically smallest optimal set is returned.
inline BruteResult brute_wdom(const Graph& g, unsigned w) {
  const std::size_t n = g.vertex_count();
  if (n > kMaxBruteWdsVertices)
    throw ArgumentError("brute-force w-domination supports at most " + std::to_string(kMaxBruteWdsVertices) + " vertices");
  auto nbr = detail::neighbor_masks(g);
  for (std::size_t k = 0; k <= n; ++k) {
    std::uint32_t found = 0;
    bool hit = !detail::for_each_combination(n, k, [&](std::uint32_t s) {
      for (Vertex v = 0; v < n; ++v)
        if (!(s >> v & 1) && static_cast<unsigned>(std::popcount(nbr[v] & s)) < w) return true;
      found = s;
      return false;
    });
    if (hit) return {k, detail::mask_to_set(found)};
  }
  throw InternalError("the full vertex set must be w-dominating");
}

/// Best L-Max objective over all sets of size <= L; ties go to smaller, then
/// lexicographically smaller, sets.
inline BruteResult brute_lmax(const Graph& g, unsigned w, std::size_t budget) {
  const std::size_t n = g.vertex_count();
  if (n > kMaxBruteLmaxVertices)
    throw ArgumentError("brute-force L-Max supports at most " + std::to_string(kMaxBruteLmaxVertices) + " vertices");
  auto nbr = detail::neighbor_masks(g);
  BruteResult best;
  std::uint32_t best_mask = 0;
  for (std::size_t k = 0; k <= std::min(budget, n); ++k)
    detail::for_each_combination(n, k, [&](std::uint32_t s) {
      std::size_t value = k;
      for (Vertex v = 0; v < n; ++v)
        if (!(s >> v & 1) && static_cast<unsigned>(std::popcount(nbr[v] & s)) >= w) ++value;
      if (value > best.value) best.value = value, best_mask = s;
      return true;
    });
  best.set = detail::mask_to_set(best_mask);
  return best;
}

}  // namespace wdom
