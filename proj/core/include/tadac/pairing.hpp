#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tadac/annotation.hpp"
#include "tadac/imaging.hpp"

namespace tadac {

/// Nonnegative per-pixel saliency matching its host image's dimensions.
class SaliencyMap {
 public:
  SaliencyMap(int width, int height, std::vector<double> values);
  /// Grayscale map image: the value is the pixel's luma.
  static SaliencyMap from_image(const ImageBuffer& img);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                   static_cast<std::size_t>(x)];
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  int width_;
  int height_;
  std::vector<double> values_;
};

/// Window of the given side with the largest saliency sum, found with a
/// summed-area table. Ties (sums within 1e-12 of the map total) go to the
/// first window in row-major order of origins.
CropWindow saliency_crop(const SaliencyMap& saliency, int side);
/// Same, after checking that the map matches the image.
CropWindow saliency_crop(const ImageBuffer& img, const SaliencyMap& saliency, int side);

/// Squared deviation of each pixel's luma from its local box mean
/// (window (2r+1)^2, truncated at the borders).
inline constexpr int kSaliencyProxyRadius = 7;
SaliencyMap saliency_proxy(const ImageBuffer& img, int radius = kSaliencyProxyRadius);

/// Intersection area of two equal-side windows divided by side^2.
double overlap_fraction(const CropWindow& a, const CropWindow& b);

inline constexpr double kMinOverlap = 0.10;
inline constexpr double kMaxOverlap = 0.30;

struct OverlapPair {
  CropWindow first;
  CropWindow second;
  double overlap = 0.0;
};

/// Two in-bounds side x side windows overlapping by a fraction drawn
/// uniformly from [0.10, 0.30] (narrowed to what the image admits). The
/// second window is the first shifted by round(side * (1 - f)) along one
/// axis, so the achieved fraction is within 0.5 / side of the target.
OverlapPair ola_pair(int width, int height, int side, std::uint64_t seed);
OverlapPair ola_pair(const ImageBuffer& img, int side, std::uint64_t seed);

enum class PairKind : std::uint8_t { ImageText, ImageImage };
enum class Polarity : std::uint8_t { Positive, Negative };
std::string_view to_name(PairKind kind) noexcept;
std::string_view to_name(Polarity polarity) noexcept;

struct ImageRef {
  std::string image_id;
  std::optional<CropWindow> crop;

  friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct TextRef {
  std::string image_id;  ///< record the text belongs to
  std::size_t text_index = 0;
  std::string text;

  friend bool operator==(const TextRef&, const TextRef&) = default;
};

struct PairRecord {
  std::size_t batch = 0;
  PairKind kind = PairKind::ImageText;
  Polarity polarity = Polarity::Positive;
  ImageRef left;
  std::optional<TextRef> right_text;    ///< image_text pairs
  std::optional<ImageRef> right_image;  ///< image_image pairs
  std::optional<double> overlap_fraction;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// One annotated image as seen by the pair builder.
struct PairSource {
  AnnotationRecord record;
  int width = 0;
  int height = 0;
  CropWindow saliency_window;
};

struct PairConfig {
  std::size_t batch_size = 8;  ///< 1 positive + (batch_size - 1) negatives
  bool negatives = true;
  bool image_text = true;
  bool image_image = true;
  int crop_side = CropWindow::kDefaultSide;
  std::uint64_t seed = 0;
};

/// Builds batches in image_id order. Per source: one image_text batch per
/// own text (saliency crop vs. that text, negatives drawn from other
/// records' texts), then one image_image batch (OLA crop pair, negatives
/// pairing the anchor crop with random crops of other images).
/// Throws ValidationError if negatives are requested with fewer than 2
/// sources.
std::vector<PairRecord> build_pair_manifest(std::span<const PairSource> sources,
                                            const PairConfig& config);

struct PairAudit {
  std::size_t batches = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Checks batch composition and polarity soundness against the sources.
PairAudit audit_pairs(std::span<const PairRecord> pairs, std::span<const PairSource> sources,
                      const PairConfig& config);

}  // namespace tadac
