#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "slidelayout/image.hpp"

namespace slidelayout {

/// 64-bit difference hash of a frame.
struct FrameHash {
  std::uint64_t bits = 0;

  bool operator==(const FrameHash&) const = default;
};

inline int hamming(FrameHash a, FrameHash b) { return std::popcount(a.bits ^ b.bits); }

/// Sixteen lowercase hex digits.
std::string to_hex(FrameHash h);
std::optional<FrameHash> hash_from_hex(std::string_view hex);

/// Difference hash over a 9x8 area-averaged grayscale downsample.
///
/// Luma is 0.299R + 0.587G + 0.114B. Each downsample cell averages the
/// source rectangle it spans, weighting partially covered pixels by their
/// overlap. Bit (r, c) is set iff cell (r, c) is strictly brighter than cell
/// (r, c+1); bits are packed row-major with (0, 0) as the most significant.
///
/// All of this is carried out in integers, so equal cells compare equal and
/// a flat frame hashes to zero. Throws ImageError for frames under 9x8.
FrameHash dhash(const RgbImage& frame);

}  // namespace slidelayout
