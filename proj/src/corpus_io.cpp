#include "slidelayout/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <stdexcept>
#include <unordered_map>

namespace slidelayout {

using nlohmann::json;

namespace {

LayoutElement parse_element(const json& raw) {
  if (!raw.is_object()) throw LayoutError(LayoutErrc::Malformed, "element is not an object");
  const auto cat = raw.find("category");
  if (cat == raw.end() || !cat->is_string()) {
    throw LayoutError(LayoutErrc::Malformed, "element missing string \"category\"");
  }
  const auto bbox = raw.find("bbox");
  if (bbox == raw.end() || !bbox->is_array() || bbox->size() != 4) {
    throw LayoutError(LayoutErrc::Malformed, "element \"bbox\" must be [x,y,w,h]");
  }
  for (const auto& v : *bbox) {
    if (!v.is_number()) throw LayoutError(LayoutErrc::Malformed, "bbox entries must be numbers");
  }
  LayoutElement element;
  element.category = parse_category(cat->get<std::string>());
  element.rect = make_rect((*bbox)[0].get<double>(), (*bbox)[1].get<double>(),
                           (*bbox)[2].get<double>(), (*bbox)[3].get<double>());
  return element;
}

}  // namespace

std::vector<LayoutElement> parse_elements(const json& raw) {
  if (!raw.is_array()) throw LayoutError(LayoutErrc::Malformed, "\"elements\" must be an array");
  std::vector<LayoutElement> out;
  out.reserve(raw.size());
  for (const auto& item : raw) out.push_back(parse_element(item));
  return out;
}

SlideLayout validate_layout(const json& raw) {
  if (!raw.is_object()) throw LayoutError(LayoutErrc::Malformed, "record is not an object");

  SlideLayout layout;
  const auto id = raw.find("id");
  if (id == raw.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw LayoutError(LayoutErrc::MissingId, "record missing \"id\"");
  }
  layout.id = id->get<std::string>();

  if (const auto source = raw.find("source"); source != raw.end() && !source->is_null()) {
    if (!source->is_string()) throw LayoutError(LayoutErrc::Malformed, "\"source\" must be a string");
    layout.source = source->get<std::string>();
  }
  if (const auto image = raw.find("image"); image != raw.end() && !image->is_null()) {
    if (!image->is_string()) throw LayoutError(LayoutErrc::Malformed, "\"image\" must be a string or null");
    layout.image_ref = image->get<std::string>();
  }
  if (const auto elements = raw.find("elements"); elements != raw.end()) {
    layout.elements = parse_elements(*elements);
  }
  return layout;
}

nlohmann::ordered_json element_to_json(const LayoutElement& element) {
  const Rect& r = element.rect;
  return {{"category", std::string(to_string(element.category))},
          {"bbox", {r.x, r.y, r.w, r.h}}};
}

nlohmann::ordered_json elements_to_json(const std::vector<LayoutElement>& elements) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& e : elements) out.push_back(element_to_json(e));
  return out;
}

nlohmann::ordered_json layout_to_json(const SlideLayout& layout) {
  nlohmann::ordered_json out;
  out["id"] = layout.id;
  out["source"] = layout.source;
  out["image"] = layout.image_ref ? nlohmann::ordered_json(*layout.image_ref) : nlohmann::ordered_json(nullptr);
  out["elements"] = elements_to_json(layout.elements);
  return out;
}

CorpusFile parse_corpus(std::istream& in) {
  CorpusFile corpus;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      SlideLayout layout = validate_layout(json::parse(text));
      const auto [it, inserted] = first_line.emplace(layout.id, line_no);
      if (!inserted) {
        corpus.errors.push_back({line_no, "duplicate id \"" + layout.id + "\" (first seen at line " +
                                              std::to_string(it->second) + ")"});
        continue;
      }
      corpus.layouts.push_back(std::move(layout));
      corpus.lines.push_back(line_no);
    } catch (const json::exception& e) {
      corpus.errors.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const LayoutError& e) {
      corpus.errors.push_back({line_no, e.what()});
    }
  }
  return corpus;
}

CorpusFile load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

std::map<Category, std::size_t> count_categories(const std::vector<SlideLayout>& layouts) {
  std::map<Category, std::size_t> counts{
      {Category::Title, 0}, {Category::Text, 0}, {Category::Figure, 0}};
  for (const auto& layout : layouts) {
    for (const auto& e : layout.elements) ++counts[e.category];
  }
  return counts;
}

}  // namespace slidelayout
