#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdom/error.hpp"
#include "wdom/value.hpp"

namespace wdom {

enum class ConvolutionMode { min_sum, max_sum };
enum class ConvolutionAlgorithm { transform, naive };

inline constexpr unsigned kMaxGroundSize = 24;
inline constexpr unsigned kMaxNaiveGroundSize = 20;

inline constexpr Cost sentinel_of(ConvolutionMode mode) noexcept {
  return mode == ConvolutionMode::min_sum ? kInfeasible : kNegInfeasible;
}

/// A function 2^S -> Z given as a dense array indexed by subset bitmask.
struct SetFunctionTable {
  unsigned ground_size = 0;
  std::vector<Cost> values;

  SetFunctionTable() : values(1, 0) {}
  SetFunctionTable(unsigned n, Cost fill) : ground_size(n), values(std::size_t{1} << n, fill) {
    if (n > kMaxGroundSize) throw ArgumentError("set function ground size above " + std::to_string(kMaxGroundSize));
  }
  SetFunctionTable(unsigned n, std::vector<Cost> v) : ground_size(n), values(std::move(v)) {
    if (n > kMaxGroundSize) throw ArgumentError("set function ground size above " + std::to_string(kMaxGroundSize));
    if (values.size() != (std::size_t{1} << n)) throw ArgumentError("set function table must have 2^n entries");
  }

  std::size_t size() const noexcept { return values.size(); }
  Cost operator[](std::size_t mask) const { return values[mask]; }
  Cost& operator[](std::size_t mask) { return values[mask]; }

  friend bool operator==(const SetFunctionTable&, const SetFunctionTable&) = default;
};

/// Fast subset convolution for values in {0..bound} plus one sentinel.
///
/// Each input f is lifted to the ranked polynomial table
///   f^[r][S](x) = sum over A subset of S, |A| = r, f(A) finite, of x^f(A),
/// the ranked products are taken pointwise and the Moebius transform recovers
/// P_Y(x) = sum over A (+) B = Y of x^(g(A)+h(B)). The min-sum (max-sum) result
/// is the lowest (highest) degree with a nonzero coefficient.
///
/// Arithmetic is modulo 2^64 (or 2^128 in the packed form). The true
/// coefficients of P_Y are counts of splits, at most 2^n, so reduction never
/// loses information. When (2*bound+1)*(n+1) <= 128 the polynomial is
/// evaluated at x = 2^(n+1) and carried in one unsigned __int128 per cell;
/// every coefficient fits its (n+1)-bit digit, so the digits are recovered
/// exactly.
///
/// The object only owns scratch buffers; reuse it to avoid reallocation.
class SubsetConvolver {
 public:
  void convolve(ConvolutionMode mode, unsigned n, std::span<const Cost> g, std::span<const Cost> h, Cost bound,
                std::span<Cost> out) {
    const std::size_t digits = 2 * static_cast<std::size_t>(bound) + 1;
    if (digits * (n + 1) <= 128)
      packed(mode, n, g, h, bound, out);
    else
      polynomial(mode, n, g, h, bound, out);
  }

  /// Ranked zeta table of one input, values taken relative to a shift.
  struct Lifted {
    unsigned n = 0;
    std::size_t len = 0;  // bound + 1
    std::vector<std::uint64_t> t;
  };

  /// Sum of ranked products of several input pairs. Split counts add up, so
  /// the optimum over all accumulated pairs is read off once after inversion.
  struct Accumulator {
    unsigned n = 0;
    std::size_t len = 0;  // 2 * bound + 1
    std::vector<std::uint64_t> t;

    void reset(unsigned ground, Cost bound) {
      n = ground;
      len = 2 * static_cast<std::size_t>(bound) + 1;
      t.assign((n + 1) * (std::size_t{1} << n) * len, 0);
    }
  };

  /// f - shift must lie in {0..bound} wherever f is not the sentinel.
  static void lift(ConvolutionMode mode, unsigned n, std::span<const Cost> f, Cost shift, Cost bound, Lifted& out) {
    const std::size_t size = std::size_t{1} << n;
    const Cost none = sentinel_of(mode);
    out.n = n;
    out.len = static_cast<std::size_t>(bound) + 1;
    out.t.assign((n + 1) * size * out.len, 0);
    for (std::size_t s = 0; s < size; ++s)
      if (f[s] != none) out.t[(std::popcount(s) * size + s) * out.len + static_cast<std::size_t>(f[s] - shift)] = 1;
    ranked_zeta(out.t, n, out.len);
  }

  static void multiply_add(const Lifted& a, const Lifted& b, Accumulator& p) {
    const std::size_t size = std::size_t{1} << p.n;
    const std::size_t in = a.len;
    for (unsigned r = 0; r <= p.n; ++r)
      for (unsigned i = 0; i <= r; ++i)
        for (std::size_t s = 0; s < size; ++s) {
          const std::uint64_t* x = a.t.data() + (i * size + s) * in;
          const std::uint64_t* y = b.t.data() + ((r - i) * size + s) * in;
          std::uint64_t* z = p.t.data() + (r * size + s) * p.len;
          for (std::size_t u = 0; u < in; ++u) {
            if (x[u] == 0) continue;
            for (std::size_t v = 0; v < in; ++v) z[u + v] += x[u] * y[v];
          }
        }
  }

  /// Inverts the accumulator in place; out[Y] is the optimum degree (relative
  /// to the sum of both shifts) or the sentinel.
  static void extract(ConvolutionMode mode, Accumulator& p, std::span<Cost> out) {
    const std::size_t size = std::size_t{1} << p.n;
    ranked_moebius(p.t, p.n, p.len);
    for (std::size_t y = 0; y < size; ++y) {
      const std::uint64_t* c = p.t.data() + (std::popcount(y) * size + y) * p.len;
      out[y] = sentinel_of(mode);
      if (mode == ConvolutionMode::min_sum) {
        for (std::size_t d = 0; d < p.len; ++d)
          if (c[d] != 0) {
            out[y] = static_cast<Cost>(d);
            break;
          }
      } else {
        for (std::size_t d = p.len; d-- > 0;)
          if (c[d] != 0) {
            out[y] = static_cast<Cost>(d);
            break;
          }
      }
    }
  }

 private:
  using u128 = unsigned __int128;

  static int lowest_bit(u128 v) {
    auto lo = static_cast<std::uint64_t>(v);
    return lo ? std::countr_zero(lo) : 64 + std::countr_zero(static_cast<std::uint64_t>(v >> 64));
  }
  static int highest_bit(u128 v) {
    auto hi = static_cast<std::uint64_t>(v >> 64);
    return hi ? 127 - std::countl_zero(hi) : 63 - std::countl_zero(static_cast<std::uint64_t>(v));
  }

  template <typename T>
  static void ranked_zeta(std::vector<T>& t, unsigned n, std::size_t stride) {
    const std::size_t size = std::size_t{1} << n;
    for (unsigned r = 0; r <= n; ++r) {
      T* layer = t.data() + r * size * stride;
      for (unsigned i = 0; i < n; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t s = 0; s < size; ++s)
          if (s & bit)
            for (std::size_t d = 0; d < stride; ++d) layer[s * stride + d] += layer[(s ^ bit) * stride + d];
      }
    }
  }

  template <typename T>
  static void ranked_moebius(std::vector<T>& t, unsigned n, std::size_t stride) {
    const std::size_t size = std::size_t{1} << n;
    for (unsigned r = 0; r <= n; ++r) {
      T* layer = t.data() + r * size * stride;
      for (unsigned i = 0; i < n; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t s = 0; s < size; ++s)
          if (s & bit)
            for (std::size_t d = 0; d < stride; ++d) layer[s * stride + d] -= layer[(s ^ bit) * stride + d];
      }
    }
  }

  void packed(ConvolutionMode mode, unsigned n, std::span<const Cost> g, std::span<const Cost> h, Cost,
              std::span<Cost> out) {
    const std::size_t size = std::size_t{1} << n;
    const unsigned digit = n + 1;
    const Cost none = sentinel_of(mode);
    auto lift = [&](std::span<const Cost> f, std::vector<u128>& t) {
      t.assign((n + 1) * size, 0);
      for (std::size_t s = 0; s < size; ++s)
        if (f[s] != none) t[std::popcount(s) * size + s] = u128{1} << (digit * static_cast<unsigned>(f[s]));
      ranked_zeta(t, n, 1);
    };
    lift(g, g_packed_);
    lift(h, h_packed_);

    p_packed_.assign((n + 1) * size, 0);
    for (unsigned r = 0; r <= n; ++r)
      for (unsigned i = 0; i <= r; ++i) {
        const u128* a = g_packed_.data() + i * size;
        const u128* b = h_packed_.data() + (r - i) * size;
        u128* p = p_packed_.data() + r * size;
        for (std::size_t s = 0; s < size; ++s) p[s] += a[s] * b[s];
      }
    ranked_moebius(p_packed_, n, 1);

    for (std::size_t y = 0; y < size; ++y) {
      u128 v = p_packed_[std::popcount(y) * size + y];
      if (v == 0) {
        out[y] = none;
      } else {
        int bit = mode == ConvolutionMode::min_sum ? lowest_bit(v) : highest_bit(v);
        out[y] = static_cast<Cost>(static_cast<unsigned>(bit) / digit);
      }
    }
  }

  void polynomial(ConvolutionMode mode, unsigned n, std::span<const Cost> g, std::span<const Cost> h, Cost bound,
                  std::span<Cost> out) {
    const std::size_t size = std::size_t{1} << n;
    const std::size_t in_len = static_cast<std::size_t>(bound) + 1;
    const std::size_t out_len = 2 * in_len - 1;
    const Cost none = sentinel_of(mode);
    auto lift = [&](std::span<const Cost> f, std::vector<std::uint64_t>& t) {
      t.assign((n + 1) * size * in_len, 0);
      for (std::size_t s = 0; s < size; ++s)
        if (f[s] != none) t[(std::popcount(s) * size + s) * in_len + static_cast<std::size_t>(f[s])] = 1;
      ranked_zeta(t, n, in_len);
    };
    lift(g, g_poly_);
    lift(h, h_poly_);

    p_poly_.assign((n + 1) * size * out_len, 0);
    for (unsigned r = 0; r <= n; ++r)
      for (unsigned i = 0; i <= r; ++i)
        for (std::size_t s = 0; s < size; ++s) {
          const std::uint64_t* a = g_poly_.data() + (i * size + s) * in_len;
          const std::uint64_t* b = h_poly_.data() + ((r - i) * size + s) * in_len;
          std::uint64_t* p = p_poly_.data() + (r * size + s) * out_len;
          for (std::size_t x = 0; x < in_len; ++x) {
            if (a[x] == 0) continue;
            for (std::size_t y = 0; y < in_len; ++y) p[x + y] += a[x] * b[y];
          }
        }
    ranked_moebius(p_poly_, n, out_len);

    for (std::size_t y = 0; y < size; ++y) {
      const std::uint64_t* p = p_poly_.data() + (std::popcount(y) * size + y) * out_len;
      out[y] = none;
      if (mode == ConvolutionMode::min_sum) {
        for (std::size_t d = 0; d < out_len; ++d)
          if (p[d] != 0) {
            out[y] = static_cast<Cost>(d);
            break;
          }
      } else {
        for (std::size_t d = out_len; d-- > 0;)
          if (p[d] != 0) {
            out[y] = static_cast<Cost>(d);
            break;
          }
      }
    }
  }

  std::vector<u128> g_packed_, h_packed_, p_packed_;
  std::vector<std::uint64_t> g_poly_, h_poly_, p_poly_;
};

/// Direct enumeration of every split A (+) B = Y; the reference semantics.
/// Values may be any integers; the mode's sentinel marks unavailable subsets.
inline SetFunctionTable naive_convolve(const SetFunctionTable& g, const SetFunctionTable& h, ConvolutionMode mode) {
  if (g.ground_size != h.ground_size) throw ArgumentError("set functions have different ground sets");
  if (g.ground_size > kMaxNaiveGroundSize)
    throw ArgumentError("naive convolution supports ground sets of at most " + std::to_string(kMaxNaiveGroundSize));
  const Cost none = sentinel_of(mode);
  SetFunctionTable out(g.ground_size, none);
  for (std::size_t y = 0; y < out.size(); ++y) {
    Cost best = none;
    for (std::size_t a = y;; a = (a - 1) & y) {
      Cost ga = g[a], hb = h[y ^ a];
      if (ga != none && hb != none) {
        Cost sum = ga + hb;
        if (best == none || (mode == ConvolutionMode::min_sum ? sum < best : sum > best)) best = sum;
      }
      if (a == 0) break;
    }
    out[y] = best;
  }
  return out;
}

namespace detail {

inline void check_convolution_input(const SetFunctionTable& f, ConvolutionMode mode, Cost bound, const char* name) {
  const Cost none = sentinel_of(mode);
  for (Cost v : f.values)
    if (v != none && (v < 0 || v > bound))
      throw ArgumentError(std::string("value ") + std::to_string(v) + " of " + name + " lies outside {0.." +
                          std::to_string(bound) + "}");
}

inline SetFunctionTable convolve(const SetFunctionTable& g, const SetFunctionTable& h, Cost bound,
                                 ConvolutionMode mode, ConvolutionAlgorithm algorithm) {
  if (g.ground_size != h.ground_size) throw ArgumentError("set functions have different ground sets");
  if (bound < 0) throw ArgumentError("value bound must be non-negative");
  check_convolution_input(g, mode, bound, "g");
  check_convolution_input(h, mode, bound, "h");
  if (algorithm == ConvolutionAlgorithm::naive) return naive_convolve(g, h, mode);
  SetFunctionTable out(g.ground_size, sentinel_of(mode));
  SubsetConvolver().convolve(mode, g.ground_size, g.values, h.values, bound, out.values);
  return out;
}

}  // namespace detail

/// out(Y) = min over A (+) B = Y of g(A) + h(B); finite values in {0..bound},
/// kInfeasible marks unavailable subsets.
inline SetFunctionTable min_sum_convolve(const SetFunctionTable& g, const SetFunctionTable& h, Cost bound,
                                         ConvolutionAlgorithm algorithm = ConvolutionAlgorithm::transform) {
  return detail::convolve(g, h, bound, ConvolutionMode::min_sum, algorithm);
}

/// Max-sum counterpart of min_sum_convolve, with kNegInfeasible as sentinel.
inline SetFunctionTable max_sum_convolve(const SetFunctionTable& g, const SetFunctionTable& h, Cost bound,
                                         ConvolutionAlgorithm algorithm = ConvolutionAlgorithm::transform) {
  return detail::convolve(g, h, bound, ConvolutionMode::max_sum, algorithm);
}

}  // namespace wdom
