#include "slidelayout/frame_hash.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <vector>

namespace slidelayout {

namespace {

constexpr int kCols = 9;
constexpr int kRows = 8;

// Splits the overlap of a unit source interval with the downsample cells.
// In scaled units the source element i spans [i*cells, (i+1)*cells] and
// destination cell j spans [j*extent, (j+1)*extent], both integers.
struct Split {
  int first = 0;
  std::int64_t first_weight = 0;
  std::int64_t second_weight = 0;  // weight into cell first+1, possibly 0
};

Split split_interval(int i, int extent, int cells) {
  const std::int64_t lo = static_cast<std::int64_t>(i) * cells;
  const std::int64_t hi = lo + cells;
  const int first = static_cast<int>(lo / extent);
  const std::int64_t boundary = static_cast<std::int64_t>(first + 1) * extent;
  if (hi <= boundary) return {first, cells, 0};
  return {first, boundary - lo, hi - boundary};
}

}  // namespace

std::string to_hex(FrameHash h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h.bits));
  return buf;
}

std::optional<FrameHash> hash_from_hex(std::string_view hex) {
  if (hex.size() != 16) return std::nullopt;
  std::uint64_t bits = 0;
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), bits, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size()) return std::nullopt;
  return FrameHash{bits};
}

FrameHash dhash(const RgbImage& frame) {
  if (frame.width < kCols || frame.height < kRows) {
    throw ImageError("frame " + std::to_string(frame.width) + "x" + std::to_string(frame.height) +
                     " is smaller than 9x8");
  }
  const int w = frame.width;
  const int h = frame.height;

  std::vector<Split> col_split(static_cast<std::size_t>(w));
  for (int x = 0; x < w; ++x) col_split[x] = split_interval(x, w, kCols);

  std::array<std::int64_t, kRows * kCols> cell{};
  std::array<std::int64_t, kCols> row_acc{};
  for (int y = 0; y < h; ++y) {
    row_acc.fill(0);
    const std::uint8_t* px = frame.at(0, y);
    for (int x = 0; x < w; ++x, px += 3) {
      const std::int64_t luma = 299 * px[0] + 587 * px[1] + 114 * px[2];
      const Split& s = col_split[x];
      row_acc[s.first] += s.first_weight * luma;
      if (s.second_weight != 0) row_acc[s.first + 1] += s.second_weight * luma;
    }
    const Split rs = split_interval(y, h, kRows);
    for (int c = 0; c < kCols; ++c) {
      cell[rs.first * kCols + c] += rs.first_weight * row_acc[c];
      if (rs.second_weight != 0) cell[(rs.first + 1) * kCols + c] += rs.second_weight * row_acc[c];
    }
  }

  // Every cell covers the same scaled area, so sums compare like means.
  std::uint64_t bits = 0;
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols - 1; ++c) {
      bits <<= 1;
      if (cell[r * kCols + c] > cell[r * kCols + c + 1]) bits |= 1u;
    }
  }
  return FrameHash{bits};
}

}  // namespace slidelayout
