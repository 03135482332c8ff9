#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "wdom/coloring.hpp"
#include "wdom/error.hpp"
#include "wdom/graph.hpp"
#include "wdom/tree_decomposition.hpp"

namespace wdom {

enum class JoinStrategy { naive, convolution };

/// Which node tables survive an evaluation.
///  - none:   only the root table (enough for the optimum).
///  - replay: everything witness extraction reads; introduce tables are
///            dropped and re-derived from their child on demand.
///  - all:    every table (for inspection and tests).
enum class TableRetention { none, replay, all };

struct DpOptions {
  JoinStrategy strategy = JoinStrategy::convolution;
  TableRetention retention = TableRetention::none;
  unsigned threads = 1;
};

namespace detail {

/// Calls fn(begin, end) on contiguous chunks of [0, count), on up to
/// `threads` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    std::size_t begin = w * chunk, end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(std::size_t{0}, std::min(count, chunk));
}

/// Adjacency among bag positions as bitmasks.
inline std::vector<std::uint32_t> bag_adjacency(const Graph& g, std::span<const Vertex> bag) {
  std::vector<std::uint32_t> mask(bag.size(), 0);
  for (std::size_t i = 0; i < bag.size(); ++i)
    for (std::size_t j = 0; j < bag.size(); ++j)
      if (i != j && g.has_edge(bag[i], bag[j])) mask[i] |= std::uint32_t{1} << j;
  return mask;
}

inline std::size_t position_in(std::span<const Vertex> bag, Vertex v) {
  auto it = std::lower_bound(bag.begin(), bag.end(), v);
  if (it == bag.end() || *it != v) throw ArgumentError("vertex " + std::to_string(v) + " is not in the bag");
  return static_cast<std::size_t>(it - bag.begin());
}

/// Where an introduce node's cell comes from in its child table.
struct IntroduceSource {
  std::size_t child_index;  // f_{t'} or, when x0 is selected, the lowered f'_{t'}
  unsigned x0_code;
  bool x0_selected;
  bool feasible;             // false when x0 lacks the selected neighbors its color demands
  unsigned neighbors_at_w;   // bag neighbors of x0 colored w in the parent coloring
};

/// Maps parent coloring indices of an introduce node to child indices.
class IntroduceMap {
 public:
  IntroduceMap(const Graph& g, std::span<const Vertex> bag, Vertex x0, unsigned w)
      : parent_(w, bag.size()), child_(w, bag.size() - 1), pos_(position_in(bag, x0)) {
    for (std::size_t i = 0; i < bag.size(); ++i)
      if (i != pos_ && g.has_edge(x0, bag[i])) neighbor_positions_.push_back(i);
  }

  const ColoringSpace& parent_space() const noexcept { return parent_; }
  const ColoringSpace& child_space() const noexcept { return child_; }
  std::size_t x0_position() const noexcept { return pos_; }

  IntroduceSource operator()(std::size_t index) const noexcept {
    const std::size_t below = index % parent_.stride(pos_);
    const std::size_t above = index / parent_.stride(pos_ + 1);
    const unsigned code = parent_.code_at(index, pos_);
    IntroduceSource src{below + above * parent_.stride(pos_), code, code == parent_.selected_code(), true, 0};

    unsigned selected_neighbors = 0;
    for (std::size_t p : neighbor_positions_) {
      unsigned c = parent_.code_at(index, p);
      if (c == parent_.selected_code()) {
        ++selected_neighbors;
        continue;
      }
      if (c == parent_.w()) ++src.neighbors_at_w;
      if (src.x0_selected && c > 0) src.child_index -= child_.stride(p > pos_ ? p - 1 : p);
    }
    if (!src.x0_selected) src.feasible = selected_neighbors >= code;
    return src;
  }

 private:
  ColoringSpace parent_, child_;
  std::size_t pos_;
  std::vector<std::size_t> neighbor_positions_;
};

/// Child index of a forget node's parent coloring extended by `code` at x0.
inline std::size_t forget_child_index(const ColoringSpace& child, std::size_t pos, std::size_t parent_index,
                                      unsigned code) {
  const std::size_t below = parent_index % child.stride(pos);
  const std::size_t above = parent_index / child.stride(pos);
  return below + code * child.stride(pos) + above * child.stride(pos + 1);
}

struct ColorPair {
  std::uint8_t left, right;
};

/// Child colors admissible at a join for a vertex with parent color s (finite)
/// and s' selected bag neighbors. With cap = min(s', w): when s <= cap the
/// bag alone supplies the demand and both children get cap; otherwise the
/// pairs (a, s + s' - a), s' <= a <= s.
inline std::size_t admissible_pairs(unsigned s, unsigned s_prime, unsigned w, std::span<ColorPair> out) {
  const unsigned cap = std::min(s_prime, w);
  if (s <= cap) {
    out[0] = {static_cast<std::uint8_t>(cap), static_cast<std::uint8_t>(cap)};
    return 1;
  }
  std::size_t k = 0;
  for (unsigned a = s_prime; a <= s; ++a)
    out[k++] = {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(s + s_prime - a)};
  return k;
}

/// Shape shared by all join enumerations over one bag.
struct JoinShape {
  JoinShape(const Graph& g, std::span<const Vertex> bag, unsigned w)
      : space(w, bag.size()), adjacency(bag_adjacency(g, bag)) {}

  ColoringSpace space;
  std::vector<std::uint32_t> adjacency;
};

/// One good pair of a parent coloring.
struct GoodPair {
  std::size_t left;
  std::size_t right;
  unsigned selected;  // |f^-1(INF)|
  unsigned left_w;    // |f_{t1}^-1(w)|
  unsigned right_w;   // |f_{t2}^-1(w)|
  unsigned parent_w;  // |f_t^-1(w)|
};

/// Enumerates every good pair of the parent coloring `index`, calling fn(GoodPair).
/// Returning false from fn stops the enumeration.
template <typename Fn>
void for_each_good_pair(const JoinShape& shape, std::size_t index, Fn&& fn) {
  const auto& space = shape.space;
  const std::size_t b = space.bag_size();
  const unsigned w = space.w();
  std::array<std::uint8_t, kMaxBagSize> codes{};
  space.decode_codes(index, std::span(codes.data(), b));

  std::uint32_t selected = 0;
  for (std::size_t i = 0; i < b; ++i)
    if (codes[i] == space.selected_code()) selected |= std::uint32_t{1} << i;

  // Per position pair lists (selected positions keep the single (INF, INF)).
  std::array<std::array<ColorPair, kMaxW + 1>, kMaxBagSize> pairs;
  std::array<std::size_t, kMaxBagSize> count{}, pick{};
  unsigned parent_w = 0;
  for (std::size_t i = 0; i < b; ++i) {
    if (selected >> i & 1) {
      auto c = static_cast<std::uint8_t>(space.selected_code());
      pairs[i][0] = {c, c};
      count[i] = 1;
      continue;
    }
    if (codes[i] == w) ++parent_w;
    count[i] = admissible_pairs(codes[i], std::popcount(shape.adjacency[i] & selected), w, pairs[i]);
  }

  const auto sel = static_cast<unsigned>(std::popcount(selected));
  while (true) {
    GoodPair gp{0, 0, sel, 0, 0, parent_w};
    for (std::size_t i = 0; i < b; ++i) {
      const ColorPair& p = pairs[i][pick[i]];
      gp.left += p.left * space.stride(i);
      gp.right += p.right * space.stride(i);
      gp.left_w += p.left == w;
      gp.right_w += p.right == w;
    }
    if (!fn(gp)) return;
    std::size_t i = 0;
    while (i < b && ++pick[i] == count[i]) pick[i++] = 0;
    if (i == b) return;
  }
}

/// A block of parent colorings resolved by one subset convolution: the
/// selected set and the colors of all other positions are fixed except on the
/// `free` positions, which take parent color 0 or 1 and split as
/// (0,0) / {(1,0),(0,1)} between the children. Base indices carry color 0 on
/// the free positions.
struct JoinStratum {
  std::size_t parent_base, left_base, right_base;
  unsigned selected;
  unsigned left_w, right_w, parent_w;  // counted outside the free positions
  std::span<const std::size_t> free_strides;
};

/// Enumerates the strata for one selected set R (bitmask over bag positions).
/// Vertices without a selected bag neighbor and parent color 0/1 become free
/// positions; every other vertex is fixed to an explicit color and pair.
template <typename Fn>
void for_each_join_stratum(const JoinShape& shape, std::uint32_t selected, Fn&& fn) {
  const auto& space = shape.space;
  const std::size_t b = space.bag_size();
  const unsigned w = space.w();

  struct Choice {
    std::uint8_t parent, left, right;
    bool free;
  };
  std::vector<std::vector<Choice>> choices(b);
  std::array<ColorPair, kMaxW + 1> buf;
  std::size_t inf_base = 0;
  for (std::size_t i = 0; i < b; ++i) {
    if (selected >> i & 1) {
      inf_base += space.selected_code() * space.stride(i);
      continue;
    }
    const unsigned s_prime = std::popcount(shape.adjacency[i] & selected);
    unsigned first_color = 0;
    if (s_prime == 0) {
      choices[i].push_back({0, 0, 0, true});
      first_color = 2;
    }
    for (unsigned c = first_color; c <= w; ++c) {
      std::size_t k = admissible_pairs(c, s_prime, w, buf);
      for (std::size_t j = 0; j < k; ++j)
        choices[i].push_back({static_cast<std::uint8_t>(c), buf[j].left, buf[j].right, false});
    }
  }

  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < b; ++i)
    if (!(selected >> i & 1)) positions.push_back(i);

  std::vector<std::size_t> pick(positions.size(), 0);
  std::vector<std::size_t> free_strides;
  const auto sel = static_cast<unsigned>(std::popcount(selected));
  while (true) {
    JoinStratum st{inf_base, inf_base, inf_base, sel, 0, 0, 0, {}};
    free_strides.clear();
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const std::size_t i = positions[k];
      const Choice& c = choices[i][pick[k]];
      if (c.free) {
        free_strides.push_back(space.stride(i));
        continue;
      }
      st.parent_base += c.parent * space.stride(i);
      st.left_base += c.left * space.stride(i);
      st.right_base += c.right * space.stride(i);
      st.parent_w += c.parent == w;
      st.left_w += c.left == w;
      st.right_w += c.right == w;
    }
    st.free_strides = free_strides;
    fn(st);
    std::size_t k = 0;
    while (k < positions.size() && ++pick[k] == choices[positions[k]].size()) pick[k++] = 0;
    if (k == positions.size()) return;
  }
}

/// Strata with at most this many free positions enumerate their splits
/// directly instead of running a transform.
inline constexpr unsigned kDirectFreeLimit = 2;

/// Offsets (sum of strides) of every subset of the free positions, by bitmask.
inline void subset_offsets(std::span<const std::size_t> strides, std::vector<std::size_t>& out) {
  out.assign(std::size_t{1} << strides.size(), 0);
  for (std::size_t m = 1; m < out.size(); ++m) {
    auto low = static_cast<std::size_t>(std::countr_zero(m));
    out[m] = out[m & (m - 1)] + strides[low];
  }
}

}  // namespace detail
}  // namespace wdom
