#include "slidelayout/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace slidelayout {

Grid::Grid(int size) : size_(size) {
  if (size < 1) throw std::invalid_argument("grid size must be >= 1");
  cells_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
}

double Grid::max() const {
  if (cells_.empty()) return 0.0;
  return *std::max_element(cells_.begin(), cells_.end());
}

double Grid::mean() const {
  if (cells_.empty()) return 0.0;
  return std::accumulate(cells_.begin(), cells_.end(), 0.0) / static_cast<double>(cells_.size());
}

namespace {

// Overlap of [lo, hi] (already scaled to cell units) with cell [i, i+1].
double span_overlap(double lo, double hi, int i) {
  const double a = std::max(lo, static_cast<double>(i));
  const double b = std::min(hi, static_cast<double>(i + 1));
  return b > a ? b - a : 0.0;
}

}  // namespace

double cell_coverage(const Rect& rect, int grid_size, int row, int col) {
  const double g = grid_size;
  const double ox = span_overlap(rect.x * g, rect.right() * g, col);
  const double oy = span_overlap(rect.y * g, rect.bottom() * g, row);
  return ox * oy;
}

void rasterize_into(const SlideLayout& layout, Category category, int grid_size,
                    double* out) {
  if (grid_size < 1) throw std::invalid_argument("grid size must be >= 1");
  const double g = grid_size;
  std::fill_n(out, static_cast<std::size_t>(grid_size) * grid_size, 0.0);

  for (const auto& element : layout.elements) {
    if (element.category != category) continue;
    const Rect& r = element.rect;
    const double x0 = r.x * g, x1 = r.right() * g;
    const double y0 = r.y * g, y1 = r.bottom() * g;

    // Only cells the box can touch; edge-only contact yields zero overlap anyway.
    const int c_begin = std::clamp(static_cast<int>(std::floor(x0)), 0, grid_size - 1);
    const int c_end = std::clamp(static_cast<int>(std::ceil(x1)), 0, grid_size);
    const int r_begin = std::clamp(static_cast<int>(std::floor(y0)), 0, grid_size - 1);
    const int r_end = std::clamp(static_cast<int>(std::ceil(y1)), 0, grid_size);

    for (int row = r_begin; row < r_end; ++row) {
      const double oy = span_overlap(y0, y1, row);
      if (oy <= 0.0) continue;
      double* line = out + static_cast<std::size_t>(row) * grid_size;
      for (int col = c_begin; col < c_end; ++col) {
        const double cover = std::min(1.0, span_overlap(x0, x1, col) * oy);
        line[col] = std::max(line[col], cover);
      }
    }
  }
}

Grid rasterize(const SlideLayout& layout, Category category, int grid_size) {
  Grid grid(grid_size);
  rasterize_into(layout, category, grid_size, grid.cells().data());
  return grid;
}

}  // namespace slidelayout
