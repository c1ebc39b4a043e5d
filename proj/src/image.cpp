#include "slidelayout/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

namespace slidelayout {

namespace {

RgbImage finish_png_read(png_image& img, const std::string& what) {
  img.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr) == 0) {
    std::string msg = img.message;
    png_image_free(&img);
    throw ImageError(what + ": " + msg);
  }
  return out;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

// Skips whitespace and '#' comments between PPM header tokens.
void skip_ppm_gap(std::istream& in) {
  while (true) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (ch != EOF && std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&img, path.c_str()) == 0) {
    throw ImageError(path.string() + ": " + img.message);
  }
  return finish_png_read(img, path.string());
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()) == 0) {
    throw ImageError(std::string("png decode: ") + img.message);
  }
  return finish_png_read(img, "png decode");
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  png_image img;
  std::memset(&img, 0, sizeof(img));
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&img, path.c_str(), 0, image.pixels.data(), 0, nullptr) == 0) {
    throw ImageError(path.string() + ": " + img.message);
  }
}

RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot open " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P6") throw ImageError(path.string() + ": not a binary PPM (P6)");
  int w = 0, h = 0, maxval = 0;
  skip_ppm_gap(in);
  in >> w;
  skip_ppm_gap(in);
  in >> h;
  skip_ppm_gap(in);
  in >> maxval;
  if (!in || w <= 0 || h <= 0 || maxval != 255) {
    throw ImageError(path.string() + ": unsupported PPM header");
  }
  in.get();  // single whitespace before the raster
  RgbImage out(w, h);
  in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(out.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.pixels.size())) {
    throw ImageError(path.string() + ": truncated PPM raster");
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageError("cannot write " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

RgbImage read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  throw ImageError(path.string() + ": unsupported image type");
}

bool is_frame_file(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".png" || ext == ".ppm";
}

}  // namespace slidelayout
