#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
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

/// c[t, f, z] for every coloring f and budget z in 0..budget: the best
/// |S| + (forgotten vertices outside S with >= w neighbors in S) + |f^-1(w)|
/// over sets S below t with |S| <= z, S meeting the bag in f^-1(INF), and
/// every other bag vertex x having >= f(x) neighbors in S. Colors act as
/// certificates: a bag vertex outside S is counted exactly when colored w.
/// Cells are laid out coloring-major: values[index * (budget + 1) + z].
struct LmaxTable {
  Bag bag;
  unsigned w = 1;
  std::size_t budget = 0;
  std::vector<Cost> values;

  ColoringSpace space() const { return ColoringSpace(w, bag.size()); }
  std::size_t width() const noexcept { return budget + 1; }
  Cost at(std::size_t index, std::size_t z) const { return values[index * width() + z]; }
  Cost at(std::span<const Color> coloring, std::size_t z) const { return at(space().encode(coloring), z); }
};

inline LmaxTable lmax_leaf(std::span<const Vertex> bag, const Graph& g, unsigned w, std::size_t budget) {
  LmaxTable t{Bag(bag.begin(), bag.end()), w, budget, {}};
  ColoringSpace space(w, bag.size());
  auto adj = detail::bag_adjacency(g, bag);
  t.values.assign(space.size() * t.width(), kNegInfeasible);
  std::array<std::uint8_t, kMaxBagSize> codes{};
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    space.decode_codes(idx, std::span(codes.data(), bag.size()));
    std::uint32_t selected = 0;
    Cost at_w = 0;
    for (std::size_t i = 0; i < bag.size(); ++i) {
      if (codes[i] == space.selected_code()) selected |= std::uint32_t{1} << i;
      else if (codes[i] == w) ++at_w;
    }
    bool ok = true;
    for (std::size_t i = 0; i < bag.size() && ok; ++i)
      if (!(selected >> i & 1) && static_cast<unsigned>(std::popcount(adj[i] & selected)) < codes[i]) ok = false;
    if (!ok) continue;
    const auto sel = static_cast<std::size_t>(std::popcount(selected));
    for (std::size_t z = sel; z <= budget; ++z) t.values[idx * t.width() + z] = static_cast<Cost>(sel) + at_w;
  }
  return t;
}

/// c[t, f, z] = max over d in {INF, 0, w} of c[t', f x d, z].
inline LmaxTable lmax_forget(const LmaxTable& child, Vertex x0, unsigned w) {
  if (child.w != w) throw ArgumentError("child table was built for a different w");
  const std::size_t pos = detail::position_in(child.bag, x0);
  LmaxTable t{child.bag, w, child.budget, {}};
  t.bag.erase(t.bag.begin() + static_cast<std::ptrdiff_t>(pos));
  ColoringSpace child_space(w, child.bag.size()), space(w, t.bag.size());
  const std::size_t width = t.width();
  t.values.resize(space.size() * width);
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const std::size_t a = detail::forget_child_index(child_space, pos, idx, child_space.selected_code()) * width;
    const std::size_t b = detail::forget_child_index(child_space, pos, idx, 0) * width;
    const std::size_t c = detail::forget_child_index(child_space, pos, idx, w) * width;
    for (std::size_t z = 0; z < width; ++z)
      t.values[idx * width + z] = std::max({child.values[a + z], child.values[b + z], child.values[c + z]});
  }
  return t;
}

namespace detail {

/// Value of an introduce cell given the matching child cell (already read at
/// budget z - 1 when x0 is selected).
inline Cost lmax_introduce_value(const IntroduceSource& src, unsigned w, Cost child_value) {
  if (!src.feasible) return kNegInfeasible;
  if (src.x0_selected) return add_max(child_value, 1 + static_cast<Cost>(src.neighbors_at_w));
  return src.x0_code == w ? add_max(child_value, 1) : child_value;
}

}  // namespace detail

/// x0 selected: c[t', f', z-1] + 1 + (bag neighbors of x0 colored w), or
/// -inf when z is exhausted; x0 colored w: c[t', f, z] + 1 if x0 has >= w
/// selected bag neighbors; x0 colored u < w: c[t', f, z] under the same test.
inline LmaxTable lmax_introduce(const LmaxTable& child, Vertex x0, std::span<const Vertex> bag, const Graph& g,
                                unsigned w, std::size_t budget) {
  if (child.w != w) throw ArgumentError("child table was built for a different w");
  if (child.budget != budget) throw ArgumentError("child table was built for a different budget");
  Bag expect = child.bag;
  if (std::binary_search(expect.begin(), expect.end(), x0)) throw ArgumentError("introduced vertex already in child bag");
  expect.insert(std::lower_bound(expect.begin(), expect.end(), x0), x0);
  if (!std::equal(expect.begin(), expect.end(), bag.begin(), bag.end()))
    throw ArgumentError("introduce bag does not equal child bag plus the vertex");

  detail::IntroduceMap map(g, bag, x0, w);
  LmaxTable t{Bag(bag.begin(), bag.end()), w, budget, {}};
  const std::size_t width = t.width();
  t.values.resize(map.parent_space().size() * width);
  for (std::size_t idx = 0; idx < map.parent_space().size(); ++idx) {
    auto src = map(idx);
    const Cost* in = child.values.data() + src.child_index * width;
    Cost* out = t.values.data() + idx * width;
    for (std::size_t z = 0; z < width; ++z) {
      if (src.x0_selected)
        out[z] = z == 0 ? kNegInfeasible : detail::lmax_introduce_value(src, w, in[z - 1]);
      else
        out[z] = detail::lmax_introduce_value(src, w, in[z]);
    }
  }
  return t;
}

namespace detail {

inline void lmax_join_naive(const JoinShape& shape, const LmaxTable& left, const LmaxTable& right,
                            std::vector<Cost>& out, unsigned threads) {
  const std::size_t width = left.width();
  const std::size_t budget = left.budget;
  parallel_for(shape.space.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      Cost* cell = out.data() + idx * width;
      std::fill(cell, cell + width, kNegInfeasible);
      for_each_good_pair(shape, idx, [&](const GoodPair& p) {
        const Cost correction = static_cast<Cost>(p.parent_w) - static_cast<Cost>(p.selected) -
                                static_cast<Cost>(p.left_w) - static_cast<Cost>(p.right_w);
        const Cost* l = left.values.data() + p.left * width;
        const Cost* r = right.values.data() + p.right * width;
        const std::size_t sel = p.selected;
        for (std::size_t z1 = sel; z1 <= budget; ++z1) {
          if (l[z1] == kNegInfeasible) continue;
          for (std::size_t z2 = sel; z1 + z2 - sel <= budget; ++z2) {
            if (r[z2] == kNegInfeasible) continue;
            Cost& c = cell[z1 + z2 - sel];
            c = std::max(c, l[z1] + r[z2] + correction);
          }
        }
        return true;
      });
    }
  });
}

inline void lmax_join_convolution(const JoinShape& shape, const LmaxTable& left, const LmaxTable& right,
                                  std::vector<Cost>& out, unsigned threads) {
  std::fill(out.begin(), out.end(), kNegInfeasible);
  const std::size_t width = left.width();
  const std::size_t budget = left.budget;
  const std::size_t b = shape.space.bag_size();
  parallel_for(std::size_t{1} << b, threads, [&](std::size_t begin, std::size_t end) {
    using Convolver = SubsetConvolver;
    std::vector<std::size_t> offsets;
    std::vector<Cost> slice, conv;
    std::vector<Convolver::Lifted> lifted_left(width), lifted_right(width);
    std::vector<char> has_left(width), has_right(width);
    Convolver::Accumulator acc;
    for (std::size_t selected = begin; selected < end; ++selected) {
      for_each_join_stratum(shape, static_cast<std::uint32_t>(selected), [&](const JoinStratum& st) {
        const auto d = static_cast<unsigned>(st.free_strides.size());
        subset_offsets(st.free_strides, offsets);
        const std::size_t sel = st.selected;
        if (sel > budget) return;
        // On free positions the w-count correction cancels (a parent 1 = w
        // splits into exactly one child 1 = w), so it is constant per stratum.
        const Cost correction = static_cast<Cost>(st.parent_w) - static_cast<Cost>(st.selected) -
                                static_cast<Cost>(st.left_w) - static_cast<Cost>(st.right_w);

        if (d <= kDirectFreeLimit) {
          for (std::size_t y = 0; y < offsets.size(); ++y)
            for (std::size_t a = y;; a = (a - 1) & y) {
              const Cost* l = left.values.data() + (st.left_base + offsets[a]) * width;
              const Cost* r = right.values.data() + (st.right_base + offsets[y ^ a]) * width;
              Cost* cell = out.data() + (st.parent_base + offsets[y]) * width;
              for (std::size_t z1 = sel; z1 <= budget; ++z1) {
                if (l[z1] == kNegInfeasible) continue;
                for (std::size_t z2 = sel; z1 + z2 - sel <= budget; ++z2)
                  if (r[z2] != kNegInfeasible) cell[z1 + z2 - sel] = std::max(cell[z1 + z2 - sel], l[z1] + r[z2] + correction);
              }
              if (a == 0) break;
            }
          return;
        }

        // One shift per child and one bound for every budget slice.
        auto range = [&](const LmaxTable& t, std::size_t base) {
          std::pair<Cost, Cost> r{kInfeasible, kNegInfeasible};
          for (std::size_t m : offsets)
            for (std::size_t z = sel; z < width; ++z) {
              Cost v = t.values[(base + m) * width + z];
              if (v == kNegInfeasible) continue;
              r.first = std::min(r.first, v);
              r.second = std::max(r.second, v);
            }
          return r;
        };
        const auto [lo_left, hi_left] = range(left, st.left_base);
        const auto [lo_right, hi_right] = range(right, st.right_base);
        if (lo_left == kInfeasible || lo_right == kInfeasible) return;
        const Cost bound = std::max(hi_left - lo_left, hi_right - lo_right);

        slice.resize(offsets.size());
        conv.resize(offsets.size());
        auto lift_all = [&](const LmaxTable& t, std::size_t base, Cost shift, std::vector<Convolver::Lifted>& lifted,
                            std::vector<char>& present) {
          for (std::size_t z = sel; z < width; ++z) {
            present[z] = 0;
            for (std::size_t m = 0; m < offsets.size(); ++m) {
              slice[m] = t.values[(base + offsets[m]) * width + z];
              present[z] |= slice[m] != kNegInfeasible;
            }
            if (present[z]) Convolver::lift(ConvolutionMode::max_sum, d, slice, shift, bound, lifted[z]);
          }
        };
        lift_all(left, st.left_base, lo_left, lifted_left, has_left);
        lift_all(right, st.right_base, lo_right, lifted_right, has_right);

        const Cost shift = lo_left + lo_right + correction;
        for (std::size_t z = sel; z <= budget; ++z) {
          bool any = false;
          acc.reset(d, bound);
          for (std::size_t z1 = sel; z1 <= z; ++z1) {
            const std::size_t z2 = z + sel - z1;
            if (!has_left[z1] || !has_right[z2]) continue;
            Convolver::multiply_add(lifted_left[z1], lifted_right[z2], acc);
            any = true;
          }
          if (!any) continue;
          Convolver::extract(ConvolutionMode::max_sum, acc, conv);
          for (std::size_t m = 0; m < offsets.size(); ++m) {
            if (conv[m] == kNegInfeasible) continue;
            Cost& cell = out[(st.parent_base + offsets[m]) * width + z];
            cell = std::max(cell, conv[m] + shift);
          }
        }
      });
    }
  });
}

}  // namespace detail

/// c[t, f, z] = max over good pairs and budget splits z1 + z2 - |f^-1(INF)| = z
/// (z1, z2 >= |f^-1(INF)|) of c[t1, f1, z1] + c[t2, f2, z2] - |f^-1(INF)|
/// - |f1^-1(w)| - |f2^-1(w)| + |f^-1(w)|.
inline LmaxTable lmax_join(const LmaxTable& left, const LmaxTable& right, std::span<const Vertex> bag, const Graph& g,
                           unsigned w, std::size_t budget, JoinStrategy strategy, unsigned threads = 1) {
  if (left.w != w || right.w != w) throw ArgumentError("child tables were built for a different w");
  if (left.budget != budget || right.budget != budget) throw ArgumentError("child tables were built for a different budget");
  if (left.bag != right.bag || !std::equal(bag.begin(), bag.end(), left.bag.begin(), left.bag.end()))
    throw ArgumentError("join children must share the parent bag");
  detail::JoinShape shape(g, bag, w);
  LmaxTable t{Bag(bag.begin(), bag.end()), w, budget, std::vector<Cost>(shape.space.size() * (budget + 1))};
  if (strategy == JoinStrategy::naive)
    detail::lmax_join_naive(shape, left, right, t.values, threads);
  else
    detail::lmax_join_convolution(shape, left, right, t.values, threads);
  return t;
}

/// Optimum at a root whose bag may be nonempty, at the full budget: root
/// vertices are selected, counted (color w) or not counted (color 0).
inline Cost lmax_root_optimum(const LmaxTable& root) {
  ColoringSpace space = root.space();
  const std::size_t b = root.bag.size();
  Cost best = kNegInfeasible;
  std::size_t total = 1;
  for (std::size_t i = 0; i < b; ++i) total *= 3;
  for (std::size_t m = 0; m < total; ++m) {
    std::size_t idx = 0, rest = m;
    for (std::size_t i = 0; i < b; ++i, rest /= 3) {
      const unsigned code = rest % 3 == 0 ? 0u : rest % 3 == 1 ? root.w : space.selected_code();
      idx += code * space.stride(i);
    }
    best = std::max(best, root.at(idx, root.budget));
  }
  return best;
}

struct LmaxEvaluation {
  unsigned w = 1;
  std::size_t budget = 0;
  std::vector<std::optional<LmaxTable>> tables;
  std::size_t table_cells = 0;
  Cost optimum = kNegInfeasible;
};

inline LmaxEvaluation evaluate_lmax(const Graph& g, const NiceDecomposition& nd, unsigned w, std::size_t budget,
                                    const DpOptions& options = {}) {
  if (w == 0) throw ArgumentError("w must be positive");
  LmaxEvaluation ev;
  ev.w = w;
  ev.budget = budget;
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
    LmaxTable table;
    switch (node.kind) {
      case NiceKind::leaf:
        table = lmax_leaf(node.bag, g, w, budget);
        break;
      case NiceKind::introduce:
        table = lmax_introduce(*ev.tables[node.children.at(0)], node.vertex, node.bag, g, w, budget);
        break;
      case NiceKind::forget:
        table = lmax_forget(*ev.tables[node.children.at(0)], node.vertex, w);
        if (table.bag != node.bag) throw ArgumentError("forget node bag mismatch");
        break;
      case NiceKind::join:
        table = lmax_join(*ev.tables[node.children.at(0)], *ev.tables[node.children.at(1)], node.bag, g, w, budget,
                          options.strategy, options.threads);
        break;
    }
    ev.table_cells += table.values.size();
    ev.tables[t] = std::move(table);
    for (NodeId c : node.children) release(c);
  }
  ev.optimum = lmax_root_optimum(*ev.tables[nd.root]);
  return ev;
}

namespace detail {

class LmaxCellReader {
 public:
  LmaxCellReader(const Graph& g, const NiceDecomposition& nd, const LmaxEvaluation& ev)
      : g_(g), nd_(nd), ev_(ev), maps_(nd.node_count()) {}

  Cost operator()(NodeId t, std::size_t idx, std::size_t z) {
    if (ev_.tables[t]) return ev_.tables[t]->at(idx, z);
    const NiceNode& node = nd_.nodes[t];
    if (node.kind != NiceKind::introduce) throw InternalError("table of node " + std::to_string(t) + " was not retained");
    auto src = map(t)(idx);
    if (src.x0_selected) {
      if (z == 0) return kNegInfeasible;
      return lmax_introduce_value(src, ev_.w, (*this)(node.children[0], src.child_index, z - 1));
    }
    return lmax_introduce_value(src, ev_.w, (*this)(node.children[0], src.child_index, z));
  }

  const IntroduceMap& map(NodeId t) {
    if (!maps_[t]) maps_[t].emplace(g_, nd_.nodes[t].bag, nd_.nodes[t].vertex, ev_.w);
    return *maps_[t];
  }

 private:
  const Graph& g_;
  const NiceDecomposition& nd_;
  const LmaxEvaluation& ev_;
  std::vector<std::optional<IntroduceMap>> maps_;
};

}  // namespace detail

/// Top-down replay. The root is replayed at the smallest budget that still
/// reaches the optimum, so the witness has the fewest vertices among optimal
/// sets. Forgets try colors 0, w, INF in that order; joins take the first
/// optimal good pair and the smallest left budget.
inline std::vector<Vertex> extract_lmax_witness(const Graph& g, const NiceDecomposition& nd, const LmaxEvaluation& ev) {
  const unsigned w = ev.w;
  detail::LmaxCellReader cell(g, nd, ev);
  std::vector<char> chosen(g.vertex_count(), 0);
  if (!ev.tables[nd.root]) throw InternalError("root table missing");
  const LmaxTable& root = *ev.tables[nd.root];

  struct Item {
    NodeId node;
    std::size_t idx, z;
  };
  std::optional<Item> start;
  {
    ColoringSpace space = root.space();
    const std::size_t b = root.bag.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < b; ++i) total *= 3;
    for (std::size_t z = 0; z <= ev.budget && !start; ++z)
      for (std::size_t m = 0; m < total && !start; ++m) {
        std::size_t idx = 0, rest = m;
        for (std::size_t i = 0; i < b; ++i, rest /= 3) {
          const unsigned code = rest % 3 == 0 ? 0u : rest % 3 == 1 ? w : space.selected_code();
          idx += code * space.stride(i);
        }
        if (root.at(idx, z) == ev.optimum) start = Item{nd.root, idx, z};
      }
  }
  if (!start) throw InternalError("root optimum not present in root table");

  std::vector<Item> stack{*start};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const NiceNode& node = nd.nodes[it.node];
    const Cost value = cell(it.node, it.idx, it.z);
    if (value == kNegInfeasible) throw InternalError("replay reached an infeasible cell");
    switch (node.kind) {
      case NiceKind::leaf: {
        ColoringSpace space(w, node.bag.size());
        for (std::size_t i = 0; i < node.bag.size(); ++i)
          if (space.code_at(it.idx, i) == space.selected_code()) chosen[node.bag[i]] = 1;
        break;
      }
      case NiceKind::introduce: {
        auto src = cell.map(it.node)(it.idx);
        if (src.x0_selected) {
          chosen[node.vertex] = 1;
          stack.push_back({node.children[0], src.child_index, it.z - 1});
        } else {
          stack.push_back({node.children[0], src.child_index, it.z});
        }
        break;
      }
      case NiceKind::forget: {
        NodeId c = node.children[0];
        ColoringSpace child_space(w, nd.nodes[c].bag.size());
        const std::size_t pos = detail::position_in(nd.nodes[c].bag, node.vertex);
        bool found = false;
        for (unsigned code : {0u, w, child_space.selected_code()}) {
          std::size_t ci = detail::forget_child_index(child_space, pos, it.idx, code);
          if (cell(c, ci, it.z) == value) {
            stack.push_back({c, ci, it.z});
            found = true;
            break;
          }
        }
        if (!found) throw InternalError("forget replay found no optimal child cell");
        break;
      }
      case NiceKind::join: {
        detail::JoinShape shape(g, node.bag, w);
        bool found = false;
        detail::for_each_good_pair(shape, it.idx, [&](const detail::GoodPair& p) {
          const Cost correction = static_cast<Cost>(p.parent_w) - static_cast<Cost>(p.selected) -
                                  static_cast<Cost>(p.left_w) - static_cast<Cost>(p.right_w);
          const std::size_t sel = p.selected;
          for (std::size_t z1 = sel; z1 <= it.z; ++z1) {
            const std::size_t z2 = it.z + sel - z1;
            Cost l = cell(node.children[0], p.left, z1), r = cell(node.children[1], p.right, z2);
            if (l == kNegInfeasible || r == kNegInfeasible || l + r + correction != value) continue;
            stack.push_back({node.children[1], p.right, z2});
            stack.push_back({node.children[0], p.left, z1});
            found = true;
            return false;
          }
          return true;
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

struct LmaxSolution {
  Cost value = kNegInfeasible;
  std::vector<Vertex> witness;
  std::size_t table_cells = 0;
};

/// L-Max w-domination. The budget is clamped to the vertex count.
inline LmaxSolution solve_lmax(const Graph& g, const NiceDecomposition& nd, unsigned w, std::size_t budget,
                               JoinStrategy strategy = JoinStrategy::convolution, bool with_witness = true,
                               unsigned threads = 1) {
  if (w == 0) throw ArgumentError("w must be positive");
  if (auto report = validate_nice(nd, g); !report.ok()) throw InvalidDecomposition(std::move(report));
  budget = std::min(budget, g.vertex_count());
  DpOptions options{strategy, with_witness ? TableRetention::replay : TableRetention::none, threads};
  auto ev = evaluate_lmax(g, nd, w, budget, options);
  LmaxSolution sol{ev.optimum, {}, ev.table_cells};
  if (with_witness) {
    sol.witness = extract_lmax_witness(g, nd, ev);
    if (sol.witness.size() > budget || lmax_value(g, sol.witness, w) != static_cast<std::size_t>(sol.value))
      throw InternalError("extracted witness does not certify the optimum");
  }
  return sol;
}

}  // namespace wdom
