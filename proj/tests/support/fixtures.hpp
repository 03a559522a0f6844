#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tadac/imaging.hpp"
#include "tadac/rng.hpp"

namespace tadac::testing {

/// 64x64 mix of ramps, a checkerboard, a disc and mild noise: enough
/// structure for every distortion to have something to act on.
inline ImageBuffer structured_fixture(int width = 64, int height = 64, std::uint64_t seed = 7) {
  ImageBuffer img(width, height);
  CounterRng rng(seed);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double r = static_cast<double>(x) / (width - 1);
      double g = static_cast<double>(y) / (height - 1);
      const double b = ((x / 8 + y / 8) % 2) != 0 ? 0.8 : 0.2;
      const double dx = x - 0.625 * width, dy = y - 0.375 * height;
      if (dx * dx + dy * dy < 100) {
        r = 0.9;
        g = 0.3;
      }
      const double n = (rng.uniform() - 0.5) * 0.1;
      img.set(x, y, {0.1 + 0.8 * r + n, 0.1 + 0.8 * g + n, b + n});
    }
  return img;
}

/// Channels on the 8-bit grid, so PNG/PPM round trips are exact.
inline ImageBuffer quantized_noise_image(int width, int height, std::uint64_t seed) {
  ImageBuffer img(width, height);
  CounterRng rng(seed);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      img.set(x, y, {static_cast<double>(rng.below(256)) / 255.0,
                     static_cast<double>(rng.below(256)) / 255.0,
                     static_cast<double>(rng.below(256)) / 255.0});
    }
  return img;
}

inline ImageBuffer solid(int width, int height, Rgb color) { return ImageBuffer(width, height, color); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tadac-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Writes `count` labelled pristine images of the given size into `dir`.
inline void write_image_fixture(const std::filesystem::path& dir, int count, int width,
                                int height) {
  std::filesystem::create_directories(dir);
  static const char* const kLabels[] = {"dog",   "elephant", "house", "owl",   "tree",
                                        "apple", "bicycle",  "ocean", "cat",   "umbrella"};
  std::string sidecar;
  for (int i = 0; i < count; ++i) {
    const std::string name = "img" + std::to_string(100 + i) + ".png";
    save_image(structured_fixture(width, height, 1000 + static_cast<std::uint64_t>(i)),
               dir / name);
    sidecar += name + "\t" + kLabels[i % 10] + "\n";
  }
  std::FILE* f = std::fopen((dir / "labels.tsv").string().c_str(), "wb");
  std::fwrite(sidecar.data(), 1, sidecar.size(), f);
  std::fclose(f);
}

}  // namespace tadac::testing
