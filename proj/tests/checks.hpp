#pragma once

#include <cstddef>
#include <string>

#include "wdom/lmax_dp.hpp"
#include "wdom/wds_dp.hpp"

namespace wdom::test {

/// f precedes f' => value(f) <= value(f'). Single-position steps c -> c+1
/// generate the order, so checking those suffices.
inline bool wds_table_monotone(const WdsTable& t) {
  const ColoringSpace space = t.space();
  for (std::size_t idx = 0; idx < space.size(); ++idx)
    for (std::size_t i = 0; i < space.bag_size(); ++i) {
      const unsigned c = space.code_at(idx, i);
      if (c >= t.w) continue;
      if (t.values[idx] > t.values[idx + space.stride(i)]) return false;
    }
  return true;
}

/// value(f, z) <= value(f, z+1).
inline bool lmax_table_budget_monotone(const LmaxTable& t) {
  for (std::size_t idx = 0; idx * t.width() < t.values.size(); ++idx)
    for (std::size_t z = 0; z < t.budget; ++z)
      if (t.at(idx, z) > t.at(idx, z + 1)) return false;
  return true;
}

inline std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t p = 1;
  while (exp--) p *= base;
  return p;
}

/// Empty string when every join table of both strategies agrees elementwise.
inline std::string compare_wds_joins(const Graph& g, const NiceDecomposition& nd, unsigned w) {
  auto a = evaluate_wds(g, nd, w, {JoinStrategy::naive, TableRetention::all, 1});
  auto b = evaluate_wds(g, nd, w, {JoinStrategy::convolution, TableRetention::all, 1});
  for (NodeId t = 0; t < nd.node_count(); ++t)
    if (nd.nodes[t].kind == NiceKind::join && a.tables[t]->values != b.tables[t]->values)
      return "join node " + std::to_string(t) + " differs";
  return {};
}

inline std::string compare_lmax_joins(const Graph& g, const NiceDecomposition& nd, unsigned w, std::size_t budget) {
  auto a = evaluate_lmax(g, nd, w, budget, {JoinStrategy::naive, TableRetention::all, 1});
  auto b = evaluate_lmax(g, nd, w, budget, {JoinStrategy::convolution, TableRetention::all, 1});
  for (NodeId t = 0; t < nd.node_count(); ++t)
    if (nd.nodes[t].kind == NiceKind::join && a.tables[t]->values != b.tables[t]->values)
      return "join node " + std::to_string(t) + " differs";
  return {};
}

}  // namespace wdom::test
