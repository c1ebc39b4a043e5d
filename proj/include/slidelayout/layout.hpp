#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slidelayout {

/// Semantic class of a box on a slide. The order is also the channel order
/// of feature vectors.
enum class Category { Title = 0, Text = 1, Figure = 2 };

inline constexpr std::array<Category, 3> kCategories{Category::Title, Category::Text,
                                                     Category::Figure};

/// Case-insensitive; throws LayoutError(UnknownCategory) for anything else.
Category parse_category(std::string_view name);
std::string_view to_string(Category c);

/// Axis-aligned box in canvas-normalized coordinates.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }

  bool operator==(const Rect&) const = default;
};

struct LayoutElement {
  Category category = Category::Title;
  Rect rect;

  bool operator==(const LayoutElement&) const = default;
};

struct SlideLayout {
  std::string id;
  std::string source;
  std::optional<std::string> image_ref;
  std::vector<LayoutElement> elements;

  bool operator==(const SlideLayout&) const = default;
};

enum class LayoutErrc {
  MissingId,
  UnknownCategory,
  DegenerateRect,
  OutOfRange,
  Malformed,
};

class LayoutError : public std::runtime_error {
 public:
  LayoutError(LayoutErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  LayoutErrc code() const noexcept { return code_; }

 private:
  LayoutErrc code_;
};

class EmptyCorpusError : public std::invalid_argument {
 public:
  EmptyCorpusError() : std::invalid_argument("corpus is empty") {}
};

/// Ingest tolerance for coordinates that fall slightly outside the canvas.
inline constexpr double kIngestTolerance = 1e-6;
/// Tolerance on the stored invariants x + w <= 1, y + h <= 1.
inline constexpr double kStoredTolerance = 1e-9;

/// Validates a raw box and clamps it onto the unit canvas.
///
/// Errors when w or h is not positive, when x or y lie outside [0,1] by more
/// than kIngestTolerance, or when the box has no area left after clamping.
/// A box extending past the right or bottom edge is trimmed to the edge.
Rect make_rect(double x, double y, double w, double h);

/// True when the rect satisfies the stored invariants.
bool is_valid(const Rect& r);

}  // namespace slidelayout
