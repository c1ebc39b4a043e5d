#include "slidelayout/layout.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace slidelayout {

Category parse_category(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "title") return Category::Title;
  if (lower == "text") return Category::Text;
  if (lower == "figure") return Category::Figure;
  throw LayoutError(LayoutErrc::UnknownCategory, "unknown category \"" + std::string(name) + "\"");
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Title:
      return "title";
    case Category::Text:
      return "text";
    case Category::Figure:
      return "figure";
  }
  return "unknown";
}

namespace {

double clamp_origin(double v, const char* axis) {
  if (!std::isfinite(v) || v < -kIngestTolerance || v > 1.0 + kIngestTolerance) {
    throw LayoutError(LayoutErrc::OutOfRange,
                      std::string(axis) + " = " + std::to_string(v) + " outside [0,1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

Rect make_rect(double x, double y, double w, double h) {
  if (!std::isfinite(w) || w <= 0.0) {
    throw LayoutError(LayoutErrc::DegenerateRect, "non-positive width " + std::to_string(w));
  }
  if (!std::isfinite(h) || h <= 0.0) {
    throw LayoutError(LayoutErrc::DegenerateRect, "non-positive height " + std::to_string(h));
  }
  Rect r;
  r.x = clamp_origin(x, "x");
  r.y = clamp_origin(y, "y");
  r.w = std::min(w, 1.0 - r.x);
  r.h = std::min(h, 1.0 - r.y);
  if (r.w <= 0.0 || r.h <= 0.0) {
    throw LayoutError(LayoutErrc::DegenerateRect, "box has no area inside the canvas");
  }
  return r;
}

bool is_valid(const Rect& r) {
  return r.x >= 0.0 && r.y >= 0.0 && r.w > 0.0 && r.h > 0.0 &&
         r.x + r.w <= 1.0 + kStoredTolerance && r.y + r.h <= 1.0 + kStoredTolerance;
}

}  // namespace slidelayout
