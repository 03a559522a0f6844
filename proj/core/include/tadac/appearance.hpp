#pragma once

#include <array>
#include <string_view>

#include "tadac/imaging.hpp"

namespace tadac {

enum class MetricKind : std::uint8_t { Brightness, Contrast, Sharpness, Colorfulness };
enum class Level : std::uint8_t { Low, Medium, High };

inline constexpr std::array<MetricKind, 4> kAllMetrics{MetricKind::Brightness, MetricKind::Contrast,
                                                       MetricKind::Sharpness,
                                                       MetricKind::Colorfulness};
inline constexpr std::array<Level, 3> kAllLevels{Level::Low, Level::Medium, Level::High};

/// "brightness", "contrast", "sharpness", "colorfulness".
std::string_view to_name(MetricKind metric) noexcept;
/// "low", "medium", "high".
std::string_view to_name(Level level) noexcept;
MetricKind metric_from_name(std::string_view name);
Level level_from_name(std::string_view name);

/// Lower/upper cut points on the normalized scale. Each cut belongs to the
/// bin above it: [0, low) -> Low, [low, high) -> Medium, [high, 1] -> High.
struct BinThresholds {
  double low;
  double high;
};
BinThresholds thresholds(MetricKind metric) noexcept;

/// Normalization constants mapping raw values onto [0, 1].
inline constexpr double kContrastScale = 0.5;      // std of an even 0/1 split
inline constexpr double kSharpnessScale = 1.0;     // 0/1 checkerboard
inline constexpr double kColorfulnessScale = 1.1;  // then clamped

/// Mean of per-pixel 0.299 r + 0.587 g + 0.114 b, in [0, 1].
double brightness(const ImageBuffer& img);

/// Population standard deviation of per-pixel brightness, in [0, 0.5].
double contrast(const ImageBuffer& img);

/// Mean absolute horizontal and vertical brightness difference over all
/// adjacent pixel pairs. Needs width, height >= 2.
double sharpness(const ImageBuffer& img);

/// Hasler-Suesstrunk colorfulness on unit-scale channels (unnormalized).
double colorfulness(const ImageBuffer& img);

/// Throws ValidationError when norm_value is outside [0, 1].
Level bin_level(MetricKind metric, double norm_value);

double normalize(MetricKind metric, double raw) noexcept;

struct MetricValue {
  double raw = 0.0;
  double norm = 0.0;
  Level level = Level::Low;

  friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

struct AppearanceProfile {
  MetricValue brightness;
  MetricValue contrast;
  MetricValue sharpness;
  MetricValue colorfulness;

  const MetricValue& get(MetricKind metric) const noexcept;
  MetricValue& get(MetricKind metric) noexcept;

  friend bool operator==(const AppearanceProfile&, const AppearanceProfile&) = default;
};

AppearanceProfile profile(const ImageBuffer& img);

}  // namespace tadac
