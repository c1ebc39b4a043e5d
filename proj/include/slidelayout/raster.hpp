#pragma once

#include <cstddef>
#include <vector>

#include "slidelayout/layout.hpp"

namespace slidelayout {

/// Square row-major grid of doubles. Cell (r, c) spans
/// x in [c/G, (c+1)/G] and y in [r/G, (r+1)/G] of the unit canvas.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int size);

  int size() const { return size_; }
  std::size_t cell_count() const { return cells_.size(); }

  double& at(int row, int col) { return cells_[index(row, col)]; }
  double at(int row, int col) const { return cells_[index(row, col)]; }

  const std::vector<double>& cells() const { return cells_; }
  std::vector<double>& cells() { return cells_; }

  double max() const;
  double mean() const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(size_) +
           static_cast<std::size_t>(col);
  }

  int size_ = 0;
  std::vector<double> cells_;
};

/// Fraction of cell (row, col) of a size-G grid covered by rect; exact
/// rectangle arithmetic in cell units.
double cell_coverage(const Rect& rect, int grid_size, int row, int col);

/// Occupancy grid of one category: each cell holds the maximum coverage over
/// all boxes of that category, so values stay in [0,1].
Grid rasterize(const SlideLayout& layout, Category category, int grid_size);

/// Same as rasterize(), but writes into a caller-owned span of G*G cells.
void rasterize_into(const SlideLayout& layout, Category category, int grid_size,
                    double* out);

}  // namespace slidelayout
