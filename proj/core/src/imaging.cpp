#include "tadac/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "tadac/errors.hpp"

namespace tadac {

double clamp_unit(double v) noexcept {
  if (!(v > 0.0)) return 0.0;  // also maps NaN to 0
  return v < 1.0 ? v : 1.0;
}

std::uint8_t quantize_channel(double v) noexcept {
  return static_cast<std::uint8_t>(std::floor(clamp_unit(v) * 255.0 + 0.5));
}

double luma(const Rgb& p) noexcept { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

std::vector<double> luma_plane(const ImageBuffer& img) {
  std::vector<double> out;
  out.reserve(img.pixel_count());
  for (const Rgb& p : img.pixels()) out.push_back(luma(p));
  return out;
}

namespace {

Rgb clamp_rgb(Rgb p) noexcept { return {clamp_unit(p.r), clamp_unit(p.g), clamp_unit(p.b)}; }

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw ValidationError("image dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
}

Rgb from_bytes(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  return {r / 255.0, g / 255.0, b / 255.0};
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Netpbm header tokens, skipping whitespace and '#' comments.
class PnmCursor {
 public:
  PnmCursor(const std::string& data, const std::filesystem::path& path)
      : data_(data), path_(path) {}

  long next_int() {
    skip_space();
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      fail("expected integer");
    }
    long v = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + (data_[pos_++] - '0');
      if (v > 1'000'000'000L) fail("integer overflow");
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from P6 raster data.
  std::size_t raster_start() {
    if (pos_ >= data_.size()) fail("missing raster");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("malformed PPM '" + path_.string() + "': " + what);
  }

 private:
  void skip_space() {
    while (pos_ < data_.size()) {
      char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& data_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 2;
};

ImageBuffer decode_ppm(const std::string& data, const std::filesystem::path& path) {
  const bool binary = data[1] == '6';
  PnmCursor cur(data, path);
  const long w = cur.next_int();
  const long h = cur.next_int();
  const long maxval = cur.next_int();
  if (w < 1 || h < 1) throw IoError("zero-dimension image '" + path.string() + "'");
  if (maxval != 255) cur.fail("only maxval 255 is supported");
  const auto count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::vector<Rgb> px;
  px.reserve(count);
  if (binary) {
    const std::size_t start = cur.raster_start();
    if (data.size() < start + 3 * count) cur.fail("truncated raster");
    for (std::size_t i = 0; i < count; ++i) {
      const auto* b = reinterpret_cast<const unsigned char*>(data.data() + start + 3 * i);
      px.push_back(from_bytes(b[0], b[1], b[2]));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      long c[3];
      for (long& v : c) {
        v = cur.next_int();
        if (v > 255) cur.fail("sample exceeds maxval");
      }
      px.push_back(from_bytes(static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]),
                              static_cast<std::uint8_t>(c[2])));
    }
  }
  return ImageBuffer(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

ImageBuffer decode_png(const std::string& data, const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, data.data(), data.size())) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("PNG decode failed for '" + path.string() + "': " + msg);
  }
  image.format = PNG_FORMAT_RGB;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw IoError("zero-dimension image '" + path.string() + "'");
  }
  std::vector<unsigned char> raster(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, raster.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw IoError("PNG decode failed for '" + path.string() + "': " + msg);
  }
  const auto count = static_cast<std::size_t>(image.width) * image.height;
  std::vector<Rgb> px;
  px.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    px.push_back(from_bytes(raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]));
  }
  return ImageBuffer(static_cast<int>(image.width), static_cast<int>(image.height),
                     std::move(px));
}

std::vector<unsigned char> to_bytes(const ImageBuffer& img) {
  std::vector<unsigned char> out;
  out.reserve(3 * img.pixel_count());
  for (const Rgb& p : img.pixels()) {
    out.push_back(quantize_channel(p.r));
    out.push_back(quantize_channel(p.g));
    out.push_back(quantize_channel(p.b));
  }
  return out;
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 clamp_rgb(fill));
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ValidationError("pixel count does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
  for (Rgb& p : pixels_) p = clamp_rgb(p);
}

void ImageBuffer::set(int x, int y, Rgb value) { pixels_[index(x, y)] = clamp_rgb(value); }

ImageBuffer load_image(const std::filesystem::path& path) {
  const std::string data = read_all(path);
  if (data.size() >= 2 && data[0] == 'P' && (data[1] == '3' || data[1] == '6')) {
    return decode_ppm(data, path);
  }
  if (data.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(data.data()), 0, 8) == 0) {
    return decode_png(data, path);
  }
  throw IoError("unsupported image format '" + path.string() + "'");
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = to_bytes(img);
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".ppm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image '" + path.string() + "'");
    out << "P6\n" << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
    return;
  }
  // Encode to memory first so a failed open surfaces as IoError, not a libpng message.
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, bytes.data(), 0, nullptr)) {
    throw IoError("PNG encode failed for '" + path.string() + "': " + image.message);
  }
  std::vector<unsigned char> encoded(size);
  if (!png_image_write_to_memory(&image, encoded.data(), &size, 0, bytes.data(), 0, nullptr)) {
    throw IoError("PNG encode failed for '" + path.string() + "': " + image.message);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

ImageBuffer crop(const ImageBuffer& img, const CropWindow& window) {
  if (!window.fits(img.width(), img.height())) {
    std::ostringstream msg;
    msg << "crop window (" << window.origin_x << ", " << window.origin_y << ", side "
        << window.side << ") exceeds " << img.width() << "x" << img.height() << " image";
    throw ValidationError(msg.str());
  }
  std::vector<Rgb> px;
  px.reserve(static_cast<std::size_t>(window.side) * static_cast<std::size_t>(window.side));
  for (int y = 0; y < window.side; ++y) {
    for (int x = 0; x < window.side; ++x) {
      px.push_back(img.at(window.origin_x + x, window.origin_y + y));
    }
  }
  return ImageBuffer(window.side, window.side, std::move(px));
}

}  // namespace tadac
