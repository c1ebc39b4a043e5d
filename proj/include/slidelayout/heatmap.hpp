#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidelayout/layout.hpp"
#include "slidelayout/raster.hpp"

namespace slidelayout {

inline constexpr int kDefaultHeatmapGrid = 32;

enum class HeatmapMode { Title, Text, Figure, All };

inline constexpr std::array<HeatmapMode, 4> kHeatmapModes{HeatmapMode::Title, HeatmapMode::Text,
                                                          HeatmapMode::Figure, HeatmapMode::All};

std::optional<HeatmapMode> parse_heatmap_mode(std::string_view name);
std::string_view to_string(HeatmapMode mode);

/// Corpus layout density for one mode.
///
/// `cells` is max-normalized to [0,1]. The per-cell sum of rasters and the
/// number of contributing slides are kept alongside so a draft can be folded
/// in without revisiting the corpus.
struct HeatmapGrid {
  HeatmapMode mode = HeatmapMode::All;
  Grid cells;
  Grid sum;
  std::size_t slides = 0;

  int size() const { return cells.size(); }
  /// Mean over slides, before normalization.
  Grid raw() const;
};

/// Throws EmptyCorpusError for an empty corpus.
HeatmapGrid compute_heatmap(const std::vector<SlideLayout>& corpus, HeatmapMode mode,
                            int grid = kDefaultHeatmapGrid);

/// Heatmap of corpus plus the draft, weighted as one more slide. An empty
/// draft leaves the grid untouched.
HeatmapGrid overlay_heatmap(const HeatmapGrid& corpus_grid, const SlideLayout& draft);

/// {"mode", "g", "cells": [[...], ...]}; raw=true emits the unnormalized mean.
nlohmann::ordered_json heatmap_to_json(const HeatmapGrid& grid, bool raw = false);

}  // namespace slidelayout
