#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidelayout/layout.hpp"

namespace slidelayout {

inline constexpr int kDefaultDescriptorGrid = 16;

/// Layout embedding: three row-major G*G occupancy channels in
/// [Title, Text, Figure] order, scaled to unit L2 norm.
struct FeatureVector {
  int grid = 0;
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  std::span<const double> channel(Category c) const;

  bool operator==(const FeatureVector&) const = default;
};

class EmptyLayoutError : public std::invalid_argument {
 public:
  EmptyLayoutError() : std::invalid_argument("layout has no elements") {}
};

class DimensionMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t descriptor_dim(int grid) {
  return 3u * static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
}

FeatureVector embed(const SlideLayout& layout, int grid = kDefaultDescriptorGrid);

/// Cosine similarity of two unit vectors, clamped into [0,1].
double similarity(const FeatureVector& a, const FeatureVector& b);

/// Divides by the L2 norm in place; all-zero input stays all-zero.
void normalize(std::vector<double>& values);

// Externally computed features ("id", "g", "values") can stand in for the
// grid descriptor of a corpus slide, e.g. activations from an image CNN.
// Imported vectors must be non-negative and 3*g*g long; they are normalized
// on import.

nlohmann::ordered_json feature_to_json(const std::string& id, const FeatureVector& f);
std::pair<std::string, FeatureVector> feature_from_json(const nlohmann::json& record);

using FeatureTable = std::unordered_map<std::string, FeatureVector>;

/// Reads line-delimited feature records; throws on the first bad line.
FeatureTable read_features(std::istream& in);

}  // namespace slidelayout
