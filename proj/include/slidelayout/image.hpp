#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace slidelayout {

/// 8-bit interleaved RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

  std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool operator==(const RgbImage&) const = default;
};

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RgbImage read_png(const std::filesystem::path& path);
RgbImage decode_png(std::span<const std::uint8_t> bytes);
void write_png(const std::filesystem::path& path, const RgbImage& image);

/// Binary PPM (P6), maxval 255 only.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

/// Dispatches on the extension (.png or .ppm, case-insensitive).
RgbImage read_image(const std::filesystem::path& path);

bool is_frame_file(const std::filesystem::path& path);

}  // namespace slidelayout
