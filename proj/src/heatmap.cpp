#include "slidelayout/heatmap.hpp"

#include <algorithm>

namespace slidelayout {

std::optional<HeatmapMode> parse_heatmap_mode(std::string_view name) {
  if (name == "title") return HeatmapMode::Title;
  if (name == "text") return HeatmapMode::Text;
  if (name == "figure") return HeatmapMode::Figure;
  if (name == "all") return HeatmapMode::All;
  return std::nullopt;
}

std::string_view to_string(HeatmapMode mode) {
  switch (mode) {
    case HeatmapMode::Title:
      return "title";
    case HeatmapMode::Text:
      return "text";
    case HeatmapMode::Figure:
      return "figure";
    case HeatmapMode::All:
      return "all";
  }
  return "unknown";
}

namespace {

// Adds one slide's contribution for `mode` into sum.
void accumulate(const SlideLayout& layout, HeatmapMode mode, Grid& sum,
                std::vector<double>& scratch) {
  const int g = sum.size();
  auto& out = sum.cells();
  if (mode != HeatmapMode::All) {
    rasterize_into(layout, static_cast<Category>(mode), g, scratch.data());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scratch[i];
    return;
  }
  const std::size_t n = out.size();
  for (Category c : kCategories) {
    rasterize_into(layout, c, g, scratch.data() + static_cast<std::size_t>(c) * n);
  }
  for (std::size_t i = 0; i < n; ++i) out[i] += scratch[i] + scratch[n + i] + scratch[2 * n + i];
}

void normalize_into(HeatmapGrid& grid) {
  grid.cells = grid.raw();
  const double peak = grid.cells.max();
  auto& cells = grid.cells.cells();
  if (peak > 0.0) {
    for (double& v : cells) v /= peak;
  } else {
    std::fill(cells.begin(), cells.end(), 0.0);
  }
}

}  // namespace

Grid HeatmapGrid::raw() const {
  Grid mean = sum;
  if (slides == 0) return mean;
  for (double& v : mean.cells()) v /= static_cast<double>(slides);
  return mean;
}

HeatmapGrid compute_heatmap(const std::vector<SlideLayout>& corpus, HeatmapMode mode, int grid) {
  if (corpus.empty()) throw EmptyCorpusError();
  HeatmapGrid out;
  out.mode = mode;
  out.sum = Grid(grid);
  std::vector<double> scratch(3 * out.sum.cell_count());
  for (const auto& layout : corpus) accumulate(layout, mode, out.sum, scratch);
  out.slides = corpus.size();
  normalize_into(out);
  return out;
}

HeatmapGrid overlay_heatmap(const HeatmapGrid& corpus_grid, const SlideLayout& draft) {
  if (draft.elements.empty()) return corpus_grid;
  HeatmapGrid out = corpus_grid;
  std::vector<double> scratch(3 * out.sum.cell_count());
  accumulate(draft, out.mode, out.sum, scratch);
  ++out.slides;
  normalize_into(out);
  return out;
}

nlohmann::ordered_json heatmap_to_json(const HeatmapGrid& grid, bool raw) {
  const Grid values = raw ? grid.raw() : grid.cells;
  auto rows = nlohmann::ordered_json::array();
  for (int r = 0; r < values.size(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < values.size(); ++c) row.push_back(values.at(r, c));
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json out;
  out["mode"] = std::string(to_string(grid.mode));
  out["g"] = grid.size();
  out["cells"] = std::move(rows);
  return out;
}

}  // namespace slidelayout
