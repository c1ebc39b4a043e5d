#include "slidelayout/service.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "slidelayout/corpus_io.hpp"

namespace slidelayout {

using ojson = nlohmann::ordered_json;

void ServiceConfig::validate() const {
  namespace fs = std::filesystem;
  if (descriptor_g < 1) throw std::invalid_argument("descriptor_g must be >= 1");
  if (heatmap_g < 1) throw std::invalid_argument("heatmap_g must be >= 1");
  if (default_k < 1) throw std::invalid_argument("default_k must be >= 1");
  if (port < 0 || port > 65535) throw std::invalid_argument("port out of range");
  if (corpus.empty()) throw std::invalid_argument("corpus path not set");
  if (!fs::is_regular_file(corpus)) {
    throw std::invalid_argument("corpus file not found: " + corpus.string());
  }
  if (!std::ifstream(corpus)) throw std::invalid_argument("corpus file not readable: " + corpus.string());
  if (!images.empty() && !fs::is_directory(images)) {
    throw std::invalid_argument("image directory not found: " + images.string());
  }
  if (!features.empty() && !fs::is_regular_file(features)) {
    throw std::invalid_argument("feature file not found: " + features.string());
  }
}

std::shared_ptr<ServiceSnapshot> make_snapshot(std::vector<SlideLayout> corpus, int descriptor_g,
                                               int heatmap_g, std::uint64_t revision,
                                               const FeatureTable* external) {
  auto snap = std::make_shared<ServiceSnapshot>();
  snap->revision = revision;
  snap->index = CorpusIndex::build(corpus, descriptor_g, revision, external);
  for (std::size_t i = 0; i < corpus.size(); ++i) snap->by_id.emplace(corpus[i].id, i);
  if (!corpus.empty()) {
    std::array<HeatmapGrid, 4> grids;
    for (HeatmapMode mode : kHeatmapModes) {
      grids[static_cast<std::size_t>(mode)] = compute_heatmap(corpus, mode, heatmap_g);
    }
    snap->heatmaps = std::move(grids);
  }
  snap->corpus = std::move(corpus);
  return snap;
}

std::string url_encode(const std::string& text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char ch : text) {
    if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.' || ch == '~') {
      out.push_back(static_cast<char>(ch));
    } else {
      out.push_back('%');
      out.push_back(kHex[ch >> 4]);
      out.push_back(kHex[ch & 15]);
    }
  }
  return out;
}

LayoutService::LayoutService(ServiceConfig config) : config_(std::move(config)) {}

void LayoutService::reload() {
  CorpusFile file = load_corpus(config_.corpus);
  if (!file.ok()) {
    const auto& first = file.errors.front();
    throw std::runtime_error(config_.corpus.string() + ":" + std::to_string(first.line) + ": " +
                             first.message);
  }
  std::optional<FeatureTable> features;
  if (!config_.features.empty()) {
    std::ifstream in(config_.features);
    if (!in) throw std::runtime_error("cannot open feature file " + config_.features.string());
    features = read_features(in);
  }
  publish(std::move(file.layouts), features ? &*features : nullptr);
}

void LayoutService::publish(std::vector<SlideLayout> corpus, const FeatureTable* external) {
  std::lock_guard lock(reload_mutex_);
  auto snap = make_snapshot(std::move(corpus), config_.descriptor_g, config_.heatmap_g,
                            last_revision_ + 1, external);
  last_revision_ = snap->revision;
  snapshot_.store(std::move(snap));
}

Response LayoutService::error(int status, const std::string& code, const std::string& message) {
  ojson body;
  body["error"] = code;
  body["message"] = message;
  return {status, "application/json", body.dump()};
}

namespace {

Response json_response(const ojson& body) { return {200, "application/json", body.dump()}; }

double transport_round(double score) { return std::round(score * 1e6) / 1e6; }

std::optional<nlohmann::json> parse_body(const std::string& body) {
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object()) return std::nullopt;
  return parsed;
}

}  // namespace

Response LayoutService::retrieve(const std::string& body) const {
  const auto snap = snapshot();
  if (!snap) return error(503, "index_not_ready", "the corpus index has not been built yet");

  const auto request = parse_body(body);
  if (!request) return error(400, "malformed_body", "request body must be a JSON object");

  SlideLayout draft;
  draft.id = "draft";
  const auto elements = request->find("elements");
  if (elements == request->end()) return error(400, "malformed_body", "missing \"elements\"");
  try {
    draft.elements = parse_elements(*elements);
  } catch (const LayoutError& e) {
    return error(400, "invalid_element", e.what());
  } catch (const nlohmann::json::exception& e) {
    return error(400, "invalid_element", e.what());
  }
  if (draft.elements.empty()) return error(400, "empty_query", "draw at least one element to search");

  int k = config_.default_k;
  if (const auto kv = request->find("k"); kv != request->end() && !kv->is_null()) {
    if (!kv->is_number_integer() || kv->get<long long>() < 1) {
      return error(400, "invalid_k", "\"k\" must be a positive integer");
    }
    k = static_cast<int>(std::min<long long>(kv->get<long long>(), 1'000'000));
  }

  if (snap->index.empty()) return error(503, "empty_corpus", "the corpus has no indexed slides");
  const RetrievalResult result = snap->index.query(draft, k);

  ojson out;
  out["revision"] = result.revision;
  auto results = ojson::array();
  for (const auto& hit : result.ranked) {
    ojson item;
    item["id"] = hit.id;
    item["score"] = transport_round(hit.score);
    item["elements"] = elements_to_json(hit.layout->elements);
    item["image_url"] = hit.layout->image_ref ? ojson("/api/slides/" + url_encode(hit.id) + "/image")
                                              : ojson(nullptr);
    results.push_back(std::move(item));
  }
  out["results"] = std::move(results);
  return json_response(out);
}

Response LayoutService::heatmap(const std::string& mode_name, bool raw) const {
  const auto mode = parse_heatmap_mode(mode_name);
  if (!mode) return error(400, "unknown_mode", "mode must be one of title, text, figure, all");
  const auto snap = snapshot();
  if (!snap) return error(503, "index_not_ready", "the corpus has not been loaded yet");
  if (!snap->heatmaps) return error(503, "empty_corpus", "the corpus is empty");
  return json_response(heatmap_to_json((*snap->heatmaps)[static_cast<std::size_t>(*mode)], raw));
}

Response LayoutService::heatmap_overlay(const std::string& body) const {
  const auto request = parse_body(body);
  if (!request) return error(400, "malformed_body", "request body must be a JSON object");
  const auto mode_field = request->find("mode");
  if (mode_field == request->end() || !mode_field->is_string()) {
    return error(400, "unknown_mode", "mode must be one of title, text, figure, all");
  }
  const auto mode = parse_heatmap_mode(mode_field->get<std::string>());
  if (!mode) return error(400, "unknown_mode", "mode must be one of title, text, figure, all");

  SlideLayout draft;
  draft.id = "draft";
  if (const auto elements = request->find("elements"); elements != request->end()) {
    try {
      draft.elements = parse_elements(*elements);
    } catch (const LayoutError& e) {
      return error(400, "invalid_element", e.what());
    } catch (const nlohmann::json::exception& e) {
      return error(400, "invalid_element", e.what());
    }
  }

  const auto snap = snapshot();
  if (!snap) return error(503, "index_not_ready", "the corpus has not been loaded yet");
  if (!snap->heatmaps) return error(503, "empty_corpus", "the corpus is empty");
  const auto& base = (*snap->heatmaps)[static_cast<std::size_t>(*mode)];
  return json_response(heatmap_to_json(overlay_heatmap(base, draft)));
}

Response LayoutService::slide(const std::string& id) const {
  const auto snap = snapshot();
  if (!snap) return error(503, "index_not_ready", "the corpus has not been loaded yet");
  const auto it = snap->by_id.find(id);
  if (it == snap->by_id.end()) return error(404, "not_found", "no slide with id \"" + id + "\"");
  const SlideLayout& layout = snap->corpus[it->second];
  ojson out = layout_to_json(layout);
  out["image_url"] = layout.image_ref ? ojson("/api/slides/" + url_encode(id) + "/image")
                                      : ojson(nullptr);
  return json_response(out);
}

std::filesystem::path LayoutService::resolve_image(const std::string& ref) const {
  const std::filesystem::path p(ref);
  if (p.is_absolute()) return p;
  if (!config_.images.empty()) return config_.images / p;
  return config_.corpus.parent_path() / p;
}

Response LayoutService::slide_image(const std::string& id) const {
  const auto snap = snapshot();
  if (!snap) return error(503, "index_not_ready", "the corpus has not been loaded yet");
  const auto it = snap->by_id.find(id);
  if (it == snap->by_id.end()) return error(404, "not_found", "no slide with id \"" + id + "\"");
  const SlideLayout& layout = snap->corpus[it->second];
  if (!layout.image_ref) return error(404, "no_image", "slide \"" + id + "\" has no image");

  std::ifstream in(resolve_image(*layout.image_ref), std::ios::binary);
  if (!in) return error(404, "no_image", "image for slide \"" + id + "\" is missing");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return {200, "image/png", std::move(bytes)};
}

Response LayoutService::stats() const {
  const auto snap = snapshot();
  ojson out;
  out["slides"] = snap ? snap->corpus.size() : 0;
  out["revision"] = snap ? snap->revision : 0;
  out["descriptor_g"] = config_.descriptor_g;
  out["heatmap_g"] = config_.heatmap_g;
  return json_response(out);
}

}  // namespace slidelayout
