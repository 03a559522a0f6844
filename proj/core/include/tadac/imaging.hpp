#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace tadac {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Decoded RGB raster with unit-scale channels. Every write is clamped to
/// [0, 1]; dimensions are fixed at construction and always positive.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, Rgb fill = {});
  ImageBuffer(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return pixels_.size(); }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, Rgb value);

  std::span<const Rgb> pixels() const noexcept { return pixels_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Square crop placement. The default side matches the 224x224 training crops.
struct CropWindow {
  static constexpr int kDefaultSide = 224;

  int origin_x = 0;
  int origin_y = 0;
  int side = kDefaultSide;

  bool fits(int width, int height) const noexcept {
    return side >= 1 && origin_x >= 0 && origin_y >= 0 && origin_x + side <= width &&
           origin_y + side <= height;
  }

  friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

double clamp_unit(double v) noexcept;

/// Round-half-up quantization to an 8-bit code: 0.5 -> 128.
std::uint8_t quantize_channel(double v) noexcept;

/// Loads PNG or PPM (P3/P6); the format is sniffed from the file magic.
/// Throws IoError naming the path on any decode failure.
ImageBuffer load_image(const std::filesystem::path& path);

/// Writes PNG, or PPM (P6) when the extension is ".ppm".
void save_image(const ImageBuffer& img, const std::filesystem::path& path);

/// Throws ValidationError if the window does not fit the image.
ImageBuffer crop(const ImageBuffer& img, const CropWindow& window);

/// Per-pixel 0.299 r + 0.587 g + 0.114 b.
double luma(const Rgb& p) noexcept;
std::vector<double> luma_plane(const ImageBuffer& img);

}  // namespace tadac
