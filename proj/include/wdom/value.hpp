#pragma once

#include <cstdint>
#include <limits>

namespace wdom {

/// Table entry type for every DP and set-function table.
using Cost = std::int32_t;

/// Sentinel of minimization tables ("+infinity"). Never takes part in arithmetic.
inline constexpr Cost kInfeasible = std::numeric_limits<Cost>::max();
/// Sentinel of maximization tables ("-infinity").
inline constexpr Cost kNegInfeasible = std::numeric_limits<Cost>::min();

inline constexpr bool is_finite(Cost c) noexcept { return c != kInfeasible && c != kNegInfeasible; }

/// a + b where either sentinel absorbs (both operands are assumed to share the
/// same sentinel).
inline constexpr Cost add_min(Cost a, Cost b) noexcept {
  return (a == kInfeasible || b == kInfeasible) ? kInfeasible : a + b;
}
inline constexpr Cost add_max(Cost a, Cost b) noexcept {
  return (a == kNegInfeasible || b == kNegInfeasible) ? kNegInfeasible : a + b;
}

}  // namespace wdom
