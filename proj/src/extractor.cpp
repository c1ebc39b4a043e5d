#include "slidelayout/extractor.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "slidelayout/image.hpp"

namespace slidelayout {

void ExtractorConfig::validate() const {
  if (stability_window < 1) throw std::invalid_argument("stability window must be >= 1");
  if (dedup_threshold < 0 || dedup_threshold > transition_threshold || transition_threshold > 64) {
    throw std::invalid_argument("thresholds must satisfy 0 <= dedup <= transition <= 64");
  }
}

SlideExtractor::SlideExtractor(ExtractorConfig config) : config_(config) { config_.validate(); }

std::optional<ExtractedSlide> SlideExtractor::push(FrameHash hash) {
  const std::size_t frame = frame_++;
  const bool stable_with_previous =
      previous_.has_value() && hamming(*previous_, hash) <= config_.dedup_threshold;
  previous_ = hash;

  if (state_ == State::Tracking) {
    if (hamming(hash, reference_) <= config_.transition_threshold) return std::nullopt;
    state_ = State::Transition;
    run_ = 1;
  } else {
    run_ = stable_with_previous ? run_ + 1 : 1;
  }
  if (run_ < config_.stability_window) return std::nullopt;

  // A stable window just completed; the current frame is the candidate.
  run_ = 0;
  state_ = State::Tracking;
  for (const auto& seen : slides_) {
    if (hamming(seen.hash, hash) <= config_.dedup_threshold) {
      reference_ = seen.hash;
      return std::nullopt;
    }
  }
  reference_ = hash;
  ExtractedSlide slide;
  slide.index = slides_.size();
  slide.frame_number = frame;
  slide.hash = hash;
  char name[32];
  std::snprintf(name, sizeof(name), "slide_%04zu.png", slide.index);
  slide.image_ref = name;
  slides_.push_back(slide);
  return slide;
}

std::vector<ExtractedSlide> extract_slides(std::span<const FrameHash> frames,
                                           const ExtractorConfig& config) {
  if (frames.empty()) throw std::invalid_argument("no frames to extract from");
  SlideExtractor extractor(config);
  for (FrameHash h : frames) extractor.push(h);
  return extractor.slides();
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

std::vector<ExtractedSlide> extract_directory(const std::filesystem::path& frames_dir,
                                              const std::filesystem::path& out_dir,
                                              const ExtractorConfig& config) {
  const auto frames = list_frames(frames_dir);
  if (frames.empty()) throw std::invalid_argument("no frame images in " + frames_dir.string());

  SlideExtractor extractor(config);
  std::filesystem::create_directories(out_dir);
  for (const auto& path : frames) {
    const RgbImage image = read_image(path);
    if (auto slide = extractor.push(dhash(image))) write_png(out_dir / slide->image_ref, image);
  }

  std::ofstream manifest(out_dir / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + out_dir.string());
  for (const auto& slide : extractor.slides()) manifest << manifest_record(slide).dump() << '\n';
  return extractor.slides();
}

nlohmann::ordered_json manifest_record(const ExtractedSlide& slide) {
  return {{"index", slide.index},
          {"frame", slide.frame_number},
          {"hash", to_hex(slide.hash)},
          {"image", slide.image_ref}};
}

}  // namespace slidelayout
