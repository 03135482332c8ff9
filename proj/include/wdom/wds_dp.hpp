#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "wdom/coloring.hpp"
#include "wdom/detail/dp_common.hpp"
#include "wdom/error.hpp"
#include "wdom/graph.hpp"
#include "wdom/nice_decomposition.hpp"
#include "wdom/oracle.hpp"
#include "wdom/subset_convolution.hpp"
#include "wdom/value.hpp"

namespace wdom {

/// c[t, f] for every coloring f of a bag: the minimum number of selected
/// vertices in the subgraph below t such that forgotten vertices are selected
/// or have >= w selected neighbors, the bag's selected vertices are exactly
/// f^-1(INF), and every other bag vertex x has >= f(x) selected neighbors.
struct WdsTable {
  Bag bag;
  unsigned w = 1;
  std::vector<Cost> values;

  ColoringSpace space() const { return ColoringSpace(w, bag.size()); }
  Cost at(std::span<const Color> coloring) const { return values[space().encode(coloring)]; }
};

inline WdsTable leaf_table(std::span<const Vertex> bag, const Graph& g, unsigned w) {
  WdsTable t{Bag(bag.begin(), bag.end()), w, {}};
  ColoringSpace space(w, bag.size());
  auto adj = detail::bag_adjacency(g, bag);
  t.values.resize(space.size());
  std::array<std::uint8_t, kMaxBagSize> codes{};
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    space.decode_codes(idx, std::span(codes.data(), bag.size()));
    std::uint32_t selected = 0;
    for (std::size_t i = 0; i < bag.size(); ++i)
      if (codes[i] == space.selected_code()) selected |= std::uint32_t{1} << i;
    Cost value = std::popcount(selected);
    for (std::size_t i = 0; i < bag.size(); ++i)
      if (!(selected >> i & 1) && static_cast<unsigned>(std::popcount(adj[i] & selected)) < codes[i]) {
        value = kInfeasible;
        break;
      }
    t.values[idx] = value;
  }
  return t;
}

/// c[t, f] = min(c[t', f x INF], c[t', f x w]).
inline WdsTable forget_step(const WdsTable& child, Vertex x0, unsigned w) {
  if (child.w != w) throw ArgumentError("child table was built for a different w");
  const std::size_t pos = detail::position_in(child.bag, x0);
  WdsTable t{child.bag, w, {}};
  t.bag.erase(t.bag.begin() + static_cast<std::ptrdiff_t>(pos));
  ColoringSpace child_space(w, child.bag.size()), space(w, t.bag.size());
  t.values.resize(space.size());
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    Cost sel = child.values[detail::forget_child_index(child_space, pos, idx, child_space.selected_code())];
    Cost dominated = child.values[detail::forget_child_index(child_space, pos, idx, w)];
    t.values[idx] = std::min(sel, dominated);
  }
  return t;
}

namespace detail {

inline Cost wds_introduce_value(const IntroduceSource& src, Cost child_value) {
  if (!src.feasible) return kInfeasible;
  return src.x0_selected ? add_min(child_value, 1) : child_value;
}

}  // namespace detail

/// x0 selected: c[t', f'] + 1 with x0's finite-colored bag neighbors lowered
/// by one; otherwise c[t', f] when x0 has >= f(x0) selected bag neighbors.
inline WdsTable introduce_step(const WdsTable& child, Vertex x0, std::span<const Vertex> bag, const Graph& g,
                               unsigned w) {
  if (child.w != w) throw ArgumentError("child table was built for a different w");
  Bag expect = child.bag;
  if (std::binary_search(expect.begin(), expect.end(), x0)) throw ArgumentError("introduced vertex already in child bag");
  expect.insert(std::lower_bound(expect.begin(), expect.end(), x0), x0);
  if (!std::equal(expect.begin(), expect.end(), bag.begin(), bag.end()))
    throw ArgumentError("introduce bag does not equal child bag plus the vertex");

  detail::IntroduceMap map(g, bag, x0, w);
  WdsTable t{Bag(bag.begin(), bag.end()), w, {}};
  t.values.resize(map.parent_space().size());
  for (std::size_t idx = 0; idx < t.values.size(); ++idx) {
    auto src = map(idx);
    t.values[idx] = detail::wds_introduce_value(src, child.values[src.child_index]);
  }
  return t;
}

namespace detail {

inline void wds_join_naive(const JoinShape& shape, const WdsTable& left, const WdsTable& right, std::vector<Cost>& out,
                           unsigned threads) {
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      Cost best = kInfeasible;
      for_each_good_pair(shape, idx, [&](const GoodPair& p) {
        Cost l = left.values[p.left], r = right.values[p.right];
        if (l != kInfeasible && r != kInfeasible) best = std::min(best, l + r - static_cast<Cost>(p.selected));
        return true;
      });
      out[idx] = best;
    }
  });
}

inline void wds_join_convolution(const JoinShape& shape, const WdsTable& left, const WdsTable& right,
                                 std::vector<Cost>& out, unsigned threads) {
  std::fill(out.begin(), out.end(), kInfeasible);
  const std::size_t b = shape.space.bag_size();
  parallel_for(std::size_t{1} << b, threads, [&](std::size_t begin, std::size_t end) {
    SubsetConvolver convolver;
    std::vector<std::size_t> offsets;
    std::vector<Cost> g, h, conv;
    for (std::size_t selected = begin; selected < end; ++selected) {
      for_each_join_stratum(shape, static_cast<std::uint32_t>(selected), [&](const JoinStratum& st) {
        const auto d = static_cast<unsigned>(st.free_strides.size());
        subset_offsets(st.free_strides, offsets);
        if (d <= kDirectFreeLimit) {
          for (std::size_t y = 0; y < offsets.size(); ++y)
            for (std::size_t a = y;; a = (a - 1) & y) {
              const Cost l = left.values[st.left_base + offsets[a]], r = right.values[st.right_base + offsets[y ^ a]];
              if (l != kInfeasible && r != kInfeasible) {
                Cost& cell = out[st.parent_base + offsets[y]];
                cell = std::min(cell, l + r - static_cast<Cost>(st.selected));
              }
              if (a == 0) break;
            }
          return;
        }
        g.resize(offsets.size());
        h.resize(offsets.size());
        conv.resize(offsets.size());
        Cost g_min = kInfeasible, h_min = kInfeasible, g_max = 0, h_max = 0;
        for (std::size_t m = 0; m < offsets.size(); ++m) {
          g[m] = left.values[st.left_base + offsets[m]];
          h[m] = right.values[st.right_base + offsets[m]];
          if (g[m] != kInfeasible) g_min = std::min(g_min, g[m]), g_max = std::max(g_max, g[m]);
          if (h[m] != kInfeasible) h_min = std::min(h_min, h[m]), h_max = std::max(h_max, h[m]);
        }
        if (g_min == kInfeasible || h_min == kInfeasible) return;
        for (std::size_t m = 0; m < offsets.size(); ++m) {
          if (g[m] != kInfeasible) g[m] -= g_min;
          if (h[m] != kInfeasible) h[m] -= h_min;
        }
        const Cost bound = std::max(g_max - g_min, h_max - h_min);
        convolver.convolve(ConvolutionMode::min_sum, d, g, h, bound, conv);
        const Cost shift = g_min + h_min - static_cast<Cost>(st.selected);
        for (std::size_t m = 0; m < offsets.size(); ++m) {
          if (conv[m] == kInfeasible) continue;
          Cost& cell = out[st.parent_base + offsets[m]];
          cell = std::min(cell, conv[m] + shift);
        }
      });
    }
  });
}

}  // namespace detail

/// c[t, f] = min over good pairs of c[t1, f1] + c[t2, f2] - |f^-1(INF)|.
inline WdsTable join_step(const WdsTable& left, const WdsTable& right, std::span<const Vertex> bag, const Graph& g,
                          unsigned w, JoinStrategy strategy, unsigned threads = 1) {
  if (left.w != w || right.w != w) throw ArgumentError("child tables were built for a different w");
  if (left.bag != right.bag || !std::equal(bag.begin(), bag.end(), left.bag.begin(), left.bag.end()))
    throw ArgumentError("join children must share the parent bag");
  detail::JoinShape shape(g, bag, w);
  WdsTable t{Bag(bag.begin(), bag.end()), w, std::vector<Cost>(shape.space.size())};
  if (strategy == JoinStrategy::naive)
    detail::wds_join_naive(shape, left, right, t.values, threads);
  else
    detail::wds_join_convolution(shape, left, right, t.values, threads);
  return t;
}

/// Optimum at a root whose bag may be nonempty: every root vertex must be
/// selected or fully dominated, so only colors w and INF are allowed.
inline Cost root_optimum(const WdsTable& root) {
  ColoringSpace space = root.space();
  Cost best = kInfeasible;
  const std::size_t b = root.bag.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << b); ++mask) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < b; ++i)
      idx += (mask >> i & 1 ? space.selected_code() : root.w) * space.stride(i);
    best = std::min(best, root.values[idx]);
  }
  return best;
}

/// Tables of a bottom-up pass over a nice decomposition.
struct WdsEvaluation {
  unsigned w = 1;
  std::vector<std::optional<WdsTable>> tables;  // by node id; absent when not retained
  std::size_t table_cells = 0;                  // cells computed over all nodes
  Cost optimum = kInfeasible;
};

/// Evaluates every node bottom-up. Leaves may carry nonempty bags; the root
/// answer is minimized over root colorings in {w, INF}.
inline WdsEvaluation evaluate_wds(const Graph& g, const NiceDecomposition& nd, unsigned w, const DpOptions& options = {}) {
  if (w == 0) throw ArgumentError("w must be positive");
  WdsEvaluation ev;
  ev.w = w;
  ev.tables.resize(nd.node_count());
  auto order = nd.bottom_up_order();
  if (order.size() != nd.node_count()) throw ArgumentError("nice decomposition has unreachable nodes");

  auto release = [&](NodeId child) {
    bool keep = options.retention == TableRetention::all ||
                (options.retention == TableRetention::replay && nd.nodes[child].kind != NiceKind::introduce);
    if (!keep) ev.tables[child].reset();
  };

  for (NodeId t : order) {
    const NiceNode& node = nd.nodes[t];
    WdsTable table;
    switch (node.kind) {
      case NiceKind::leaf:
        table = leaf_table(node.bag, g, w);
        break;
      case NiceKind::introduce:
        table = introduce_step(*ev.tables[node.children.at(0)], node.vertex, node.bag, g, w);
        break;
      case NiceKind::forget:
        table = forget_step(*ev.tables[node.children.at(0)], node.vertex, w);
        if (table.bag != node.bag) throw ArgumentError("forget node bag mismatch");
        break;
      case NiceKind::join:
        table = join_step(*ev.tables[node.children.at(0)], *ev.tables[node.children.at(1)], node.bag, g, w,
                          options.strategy, options.threads);
        break;
    }
    ev.table_cells += table.values.size();
    ev.tables[t] = std::move(table);
    for (NodeId c : node.children) release(c);
  }
  ev.optimum = root_optimum(*ev.tables[nd.root]);
  return ev;
}

namespace detail {

/// Reads table cells, re-deriving dropped introduce tables from their child.
class WdsCellReader {
 public:
  WdsCellReader(const Graph& g, const NiceDecomposition& nd, const WdsEvaluation& ev)
      : g_(g), nd_(nd), ev_(ev), maps_(nd.node_count()) {}

  Cost operator()(NodeId t, std::size_t idx) {
    if (ev_.tables[t]) return ev_.tables[t]->values.at(idx);
    const NiceNode& node = nd_.nodes[t];
    if (node.kind != NiceKind::introduce) throw InternalError("table of node " + std::to_string(t) + " was not retained");
    auto src = map(t)(idx);
    return wds_introduce_value(src, (*this)(node.children[0], src.child_index));
  }

  const IntroduceMap& map(NodeId t) {
    if (!maps_[t]) maps_[t].emplace(g_, nd_.nodes[t].bag, nd_.nodes[t].vertex, ev_.w);
    return *maps_[t];
  }

 private:
  const Graph& g_;
  const NiceDecomposition& nd_;
  const WdsEvaluation& ev_;
  std::vector<std::optional<IntroduceMap>> maps_;
};

}  // namespace detail

/// Top-down replay of an evaluation made with retention `replay` or `all`.
/// Forget nodes prefer the unselected color on ties; joins take the first
/// optimal good pair in enumeration order.
inline std::vector<Vertex> extract_witness(const Graph& g, const NiceDecomposition& nd, const WdsEvaluation& ev) {
  const unsigned w = ev.w;
  detail::WdsCellReader cell(g, nd, ev);
  std::vector<char> chosen(g.vertex_count(), 0);

  const WdsTable* root = ev.tables[nd.root] ? &*ev.tables[nd.root] : nullptr;
  if (!root) throw InternalError("root table missing");
  std::size_t root_idx = 0;
  {
    ColoringSpace space = root->space();
    const std::size_t b = root->bag.size();
    bool found = false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << b) && !found; ++mask) {
      std::size_t idx = 0;
      for (std::size_t i = 0; i < b; ++i) idx += (mask >> i & 1 ? space.selected_code() : w) * space.stride(i);
      if (root->values[idx] == ev.optimum) root_idx = idx, found = true;
    }
    if (!found) throw InternalError("root optimum not present in root table");
  }

  std::vector<std::pair<NodeId, std::size_t>> stack{{nd.root, root_idx}};
  while (!stack.empty()) {
    auto [t, idx] = stack.back();
    stack.pop_back();
    const NiceNode& node = nd.nodes[t];
    const Cost value = cell(t, idx);
    if (value == kInfeasible) throw InternalError("replay reached an infeasible cell");
    switch (node.kind) {
      case NiceKind::leaf: {
        ColoringSpace space(w, node.bag.size());
        for (std::size_t i = 0; i < node.bag.size(); ++i)
          if (space.code_at(idx, i) == space.selected_code()) chosen[node.bag[i]] = 1;
        break;
      }
      case NiceKind::introduce: {
        auto src = cell.map(t)(idx);
        if (src.x0_selected) chosen[node.vertex] = 1;
        stack.emplace_back(node.children[0], src.child_index);
        break;
      }
      case NiceKind::forget: {
        NodeId c = node.children[0];
        ColoringSpace child_space(w, nd.nodes[c].bag.size());
        const std::size_t pos = detail::position_in(nd.nodes[c].bag, node.vertex);
        std::size_t dominated = detail::forget_child_index(child_space, pos, idx, w);
        std::size_t selected = detail::forget_child_index(child_space, pos, idx, child_space.selected_code());
        if (cell(c, dominated) == value)
          stack.emplace_back(c, dominated);
        else if (cell(c, selected) == value)
          stack.emplace_back(c, selected);
        else
          throw InternalError("forget replay found no optimal child cell");
        break;
      }
      case NiceKind::join: {
        detail::JoinShape shape(g, node.bag, w);
        bool found = false;
        detail::for_each_good_pair(shape, idx, [&](const detail::GoodPair& p) {
          Cost l = cell(node.children[0], p.left), r = cell(node.children[1], p.right);
          if (l == kInfeasible || r == kInfeasible || l + r - static_cast<Cost>(p.selected) != value) return true;
          stack.emplace_back(node.children[1], p.right);
          stack.emplace_back(node.children[0], p.left);
          found = true;
          return false;
        });
        if (!found) throw InternalError("join replay found no optimal good pair");
        break;
      }
    }
  }

  std::vector<Vertex> witness;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (chosen[v]) witness.push_back(v);
  return witness;
}

struct WdsSolution {
  Cost size = kInfeasible;
  std::vector<Vertex> witness;  // sorted; empty unless requested
  std::size_t table_cells = 0;
};

/// Minimum w-dominating set via the nice decomposition. The witness, when
/// requested, is re-validated before it is returned.
inline WdsSolution solve_wdom(const Graph& g, const NiceDecomposition& nd, unsigned w,
                              JoinStrategy strategy = JoinStrategy::convolution, bool with_witness = true,
                              unsigned threads = 1) {
  if (w == 0) throw ArgumentError("w must be positive");
  if (auto report = validate_nice(nd, g); !report.ok()) throw InvalidDecomposition(std::move(report));
  DpOptions options{strategy, with_witness ? TableRetention::replay : TableRetention::none, threads};
  auto ev = evaluate_wds(g, nd, w, options);
  WdsSolution sol{ev.optimum, {}, ev.table_cells};
  if (with_witness) {
    sol.witness = extract_witness(g, nd, ev);
    if (sol.witness.size() != static_cast<std::size_t>(sol.size) || !is_w_dominating(g, sol.witness, w))
      throw InternalError("extracted witness does not certify the optimum");
  }
  return sol;
}

}  // namespace wdom
