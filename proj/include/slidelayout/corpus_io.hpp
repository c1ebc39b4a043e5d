#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidelayout/layout.hpp"

namespace slidelayout {

/// Decodes one annotation record:
///   {"id": str, "source": str, "image": str|null,
///    "elements": [{"category": "title"|"text"|"figure", "bbox": [x,y,w,h]}]}
/// Rects are validated and clamped; categories are matched case-insensitively.
SlideLayout validate_layout(const nlohmann::json& raw);

/// Decodes an elements array (the shape shared by corpus records and API
/// request bodies).
std::vector<LayoutElement> parse_elements(const nlohmann::json& raw);

nlohmann::ordered_json element_to_json(const LayoutElement& element);
nlohmann::ordered_json elements_to_json(const std::vector<LayoutElement>& elements);
nlohmann::ordered_json layout_to_json(const SlideLayout& layout);

struct RecordError {
  std::size_t line = 0;
  std::string message;
};

struct CorpusFile {
  std::vector<SlideLayout> layouts;
  /// Line number (1-based) each layout came from, parallel to layouts.
  std::vector<std::size_t> lines;
  std::vector<RecordError> errors;

  bool ok() const { return errors.empty(); }
};

/// Parses line-delimited annotation records. Blank lines are ignored.
/// Invalid records and duplicate ids are collected as errors rather than
/// thrown; the duplicate's second occurrence is not kept.
CorpusFile parse_corpus(std::istream& in);

/// Throws std::runtime_error when the file cannot be opened.
CorpusFile load_corpus(const std::filesystem::path& path);

/// Element counts per category across all layouts.
std::map<Category, std::size_t> count_categories(const std::vector<SlideLayout>& layouts);

}  // namespace slidelayout
