#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slidelayout/frame_hash.hpp"

namespace slidelayout {

struct ExtractorConfig {
  /// Bits of change against the last emitted slide that start a transition.
  int transition_threshold = 10;
  /// Consecutive mutually stable frames required before capturing.
  int stability_window = 5;
  /// Max distance for consecutive frames to count as stable, and for a
  /// candidate to count as a revisit of an emitted slide.
  int dedup_threshold = 4;

  /// Throws std::invalid_argument unless 0 <= D <= T <= 64 and S >= 1.
  void validate() const;
};

struct ExtractedSlide {
  std::size_t index = 0;
  std::size_t frame_number = 0;
  FrameHash hash;
  std::string image_ref;

  bool operator==(const ExtractedSlide&) const = default;
};

/// Streaming slide-change detector over per-frame hashes.
///
/// Before the first slide it waits for S consecutive stable frames and emits
/// the last of them. Afterwards a frame further than T from the current
/// reference slide opens a transition; the next run of S stable frames
/// yields a candidate, which is emitted unless it lies within D of any slide
/// already emitted. Either way the matched or new slide becomes the
/// reference.
class SlideExtractor {
 public:
  explicit SlideExtractor(ExtractorConfig config);

  /// Feeds the next frame; returns the slide when this frame is captured.
  std::optional<ExtractedSlide> push(FrameHash hash);

  const std::vector<ExtractedSlide>& slides() const { return slides_; }
  std::size_t frames_seen() const { return frame_; }

 private:
  enum class State { Searching, Tracking, Transition };

  ExtractorConfig config_;
  State state_ = State::Searching;
  std::size_t frame_ = 0;
  std::optional<FrameHash> previous_;
  int run_ = 0;
  FrameHash reference_;
  std::vector<ExtractedSlide> slides_;
};

/// Runs the detector over a complete hash sequence. Throws
/// std::invalid_argument for an empty sequence.
std::vector<ExtractedSlide> extract_slides(std::span<const FrameHash> frames,
                                           const ExtractorConfig& config = {});

/// Frame files (.png/.ppm) in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Hashes every frame in `frames_dir` in order, writes each captured frame
/// to `out_dir` as slide_NNNN.png and a manifest.jsonl beside them. Throws
/// std::invalid_argument when there are no frames.
std::vector<ExtractedSlide> extract_directory(const std::filesystem::path& frames_dir,
                                              const std::filesystem::path& out_dir,
                                              const ExtractorConfig& config = {});

/// {"index", "frame", "hash", "image"}
nlohmann::ordered_json manifest_record(const ExtractedSlide& slide);

}  // namespace slidelayout
