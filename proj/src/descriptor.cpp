#include "slidelayout/descriptor.hpp"

#include <algorithm>
#include <cmath>

#include "slidelayout/raster.hpp"

namespace slidelayout {

std::span<const double> FeatureVector::channel(Category c) const {
  const std::size_t n = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
  return std::span<const double>(values).subspan(static_cast<std::size_t>(c) * n, n);
}

void normalize(std::vector<double>& values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (sq <= 0.0) return;
  const double norm = std::sqrt(sq);
  for (double& v : values) v /= norm;
}

FeatureVector embed(const SlideLayout& layout, int grid) {
  if (layout.elements.empty()) throw EmptyLayoutError();
  if (grid < 1) throw std::invalid_argument("descriptor grid must be >= 1");

  FeatureVector f;
  f.grid = grid;
  f.values.assign(descriptor_dim(grid), 0.0);
  const std::size_t channel = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
  for (Category c : kCategories) {
    rasterize_into(layout, c, grid, f.values.data() + static_cast<std::size_t>(c) * channel);
  }
  normalize(f.values);
  return f;
}

double similarity(const FeatureVector& a, const FeatureVector& b) {
  if (a.values.size() != b.values.size()) {
    throw DimensionMismatchError("feature dimensions differ: " + std::to_string(a.values.size()) +
                                 " vs " + std::to_string(b.values.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return std::clamp(dot, 0.0, 1.0);
}

nlohmann::ordered_json feature_to_json(const std::string& id, const FeatureVector& f) {
  return {{"id", id}, {"g", f.grid}, {"values", f.values}};
}

std::pair<std::string, FeatureVector> feature_from_json(const nlohmann::json& record) {
  const std::string id = record.at("id").get<std::string>();
  FeatureVector f;
  f.grid = record.at("g").get<int>();
  if (f.grid < 1) throw std::invalid_argument("feature record " + id + ": g must be >= 1");
  f.values = record.at("values").get<std::vector<double>>();
  if (f.values.size() != descriptor_dim(f.grid)) {
    throw DimensionMismatchError("feature record " + id + ": expected " +
                                 std::to_string(descriptor_dim(f.grid)) + " values, got " +
                                 std::to_string(f.values.size()));
  }
  for (double v : f.values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("feature record " + id + ": values must be finite and >= 0");
    }
  }
  normalize(f.values);
  return {id, std::move(f)};
}

FeatureTable read_features(std::istream& in) {
  FeatureTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto [id, f] = feature_from_json(nlohmann::json::parse(line));
    table.insert_or_assign(std::move(id), std::move(f));
  }
  return table;
}

}  // namespace slidelayout
