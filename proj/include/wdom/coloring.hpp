#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdom/error.hpp"

namespace wdom {

/// A bag color: 0..w is "at least that many selected neighbors", kSelected is
/// the +infinity color meaning "in the set".
using Color = std::uint8_t;
inline constexpr Color kSelected = 0xFF;
inline constexpr unsigned kMaxW = 64;
inline constexpr std::size_t kMaxBagSize = 24;

/// True iff a precedes b in the color order: equal colors, or two finite
/// colors with a <= b. kSelected is only comparable to itself.
inline constexpr bool precedes(Color a, Color b) noexcept {
  return a == b || (a != kSelected && b != kSelected && a <= b);
}

/// Mixed-radix indexing of all colorings of a bag of fixed size:
/// index = sum_i code_i * (w+2)^i, with code(s) = s and code(kSelected) = w+1.
/// Position i refers to the i-th smallest vertex of the bag.
class ColoringSpace {
 public:
  ColoringSpace(unsigned w, std::size_t bag_size) : w_(w), radix_(w + 2), stride_(bag_size + 1) {
    if (w == 0 || w > kMaxW) throw ArgumentError("w must lie in 1.." + std::to_string(kMaxW));
    if (bag_size > kMaxBagSize) throw ArgumentError("bag of size " + std::to_string(bag_size) + " is too large");
    stride_[0] = 1;
    for (std::size_t i = 0; i < bag_size; ++i) {
      if (stride_[i] > (std::size_t{1} << 40) / radix_)
        throw ArgumentError("coloring table for a bag of size " + std::to_string(bag_size) + " with w=" +
                            std::to_string(w) + " is too large");
      stride_[i + 1] = stride_[i] * radix_;
    }
  }

  unsigned w() const noexcept { return w_; }
  unsigned radix() const noexcept { return radix_; }
  unsigned selected_code() const noexcept { return w_ + 1; }
  std::size_t bag_size() const noexcept { return stride_.size() - 1; }
  std::size_t size() const noexcept { return stride_.back(); }
  std::size_t stride(std::size_t pos) const noexcept { return stride_[pos]; }

  unsigned code_at(std::size_t index, std::size_t pos) const noexcept {
    return static_cast<unsigned>((index / stride_[pos]) % radix_);
  }

  unsigned code_of(Color c) const noexcept { return c == kSelected ? w_ + 1 : c; }
  Color color_of(unsigned code) const noexcept { return code == w_ + 1 ? kSelected : static_cast<Color>(code); }

  std::size_t encode(std::span<const Color> colors) const {
    if (colors.size() != bag_size()) throw ArgumentError("coloring length does not match the bag");
    std::size_t index = 0;
    for (std::size_t i = 0; i < colors.size(); ++i) {
      if (colors[i] != kSelected && colors[i] > w_) throw ArgumentError("color outside the palette");
      index += code_of(colors[i]) * stride_[i];
    }
    return index;
  }

  std::vector<Color> decode(std::size_t index) const {
    std::vector<Color> colors(bag_size());
    for (std::size_t i = 0; i < colors.size(); ++i, index /= radix_) colors[i] = color_of(index % radix_);
    return colors;
  }

  /// Codes of every position, written into `codes` (length bag_size()).
  void decode_codes(std::size_t index, std::span<std::uint8_t> codes) const noexcept {
    for (std::size_t i = 0; i < codes.size(); ++i, index /= radix_) codes[i] = static_cast<std::uint8_t>(index % radix_);
  }

 private:
  unsigned w_;
  unsigned radix_;
  std::vector<std::size_t> stride_;
};

}  // namespace wdom
