#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "tadac/imaging.hpp"

namespace tadac {

/// The 19 synthetic distortion types. Underlying values follow the
/// conventional 1-based type numbering.
enum class DistortionType : std::uint8_t {
  Blur = 1,
  MotionBlur,
  ColorDiffusion,
  ColorChange,
  JpegCompression,
  Jpeg2000Compression,
  Noise,
  ImpulseNoise,
  Darken,
  Brighten,
  JitterDistortion,
  PixelateDistortion,
  NonEccentricityPatch,
  QuantizationDistortion,
  DenoisingRelated,
  ColorBlocks,
  Sharpness,
  Contrast,
  UncomfortableLuminanceChange,
};

inline constexpr int kDistortionTypeCount = 19;
inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 5;

inline constexpr std::array<DistortionType, kDistortionTypeCount> kAllDistortionTypes = [] {
  std::array<DistortionType, kDistortionTypeCount> out{};
  for (int i = 0; i < kDistortionTypeCount; ++i) out[i] = static_cast<DistortionType>(i + 1);
  return out;
}();

/// lower_snake_case name used in manifests and phrase-table headers.
std::string_view to_name(DistortionType kind) noexcept;
/// Human-readable name, e.g. "Motion Blur".
std::string_view display_name(DistortionType kind) noexcept;
/// Inverse of to_name; throws ValidationError for unknown names.
DistortionType distortion_from_name(std::string_view name);

struct DistortionSpec {
  DistortionType kind = DistortionType::Blur;
  int level = 1;
  std::uint64_t seed = 0;

  friend bool operator==(const DistortionSpec&, const DistortionSpec&) = default;
};

/// One row of the frozen per-level parameter table. `primary` is the
/// quantity whose growth drives severity; `secondary` is a companion
/// parameter (0 when unused).
struct ParameterSet {
  double primary = 0.0;
  double secondary = 0.0;
  std::string_view primary_name;
  std::string_view secondary_name;
};

void check_level(int level);

/// Pure table lookup. Throws ValidationError for levels outside 1..5.
ParameterSet distortion_parameters(DistortionType kind, int level);

/// True for kinds that draw from the seeded counter generator.
bool is_stochastic(DistortionType kind) noexcept;

/// Smallest width/height the kind accepts (8 for kernel- and block-based kinds).
int min_dimension(DistortionType kind) noexcept;

/// Deterministic in (img, spec); output has the input's dimensions and is
/// clamped to [0, 1]. Throws ValidationError for a bad level or an image
/// smaller than min_dimension(kind).
ImageBuffer apply_distortion(const ImageBuffer& img, const DistortionSpec& spec);

/// Nonzero quantized DCT coefficients produced by the JPEG emulation at
/// `level`; stands in for encoded file size.
std::size_t jpeg_nonzero_coefficients(const ImageBuffer& img, int level);

/// Sum of squared horizontal and vertical luma differences.
double gradient_energy(const ImageBuffer& img);

}  // namespace tadac
