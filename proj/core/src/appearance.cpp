#include "tadac/appearance.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tadac/errors.hpp"

namespace tadac {

std::string_view to_name(MetricKind metric) noexcept {
  switch (metric) {
    case MetricKind::Brightness:
      return "brightness";
    case MetricKind::Contrast:
      return "contrast";
    case MetricKind::Sharpness:
      return "sharpness";
    case MetricKind::Colorfulness:
      return "colorfulness";
  }
  return "";
}

std::string_view to_name(Level level) noexcept {
  switch (level) {
    case Level::Low:
      return "low";
    case Level::Medium:
      return "medium";
    case Level::High:
      return "high";
  }
  return "";
}

MetricKind metric_from_name(std::string_view name) {
  for (MetricKind m : kAllMetrics)
    if (to_name(m) == name) return m;
  throw ValidationError("unknown appearance metric '" + std::string(name) + "'");
}

Level level_from_name(std::string_view name) {
  for (Level l : kAllLevels)
    if (to_name(l) == name) return l;
  throw ValidationError("unknown level '" + std::string(name) + "'");
}

BinThresholds thresholds(MetricKind metric) noexcept {
  switch (metric) {
    case MetricKind::Brightness:
      return {0.40, 0.55};
    case MetricKind::Contrast:
      return {0.40, 0.60};
    case MetricKind::Sharpness:
      return {0.10, 0.21};
    case MetricKind::Colorfulness:
      return {0.15, 0.25};
  }
  return {0.0, 0.0};
}

double brightness(const ImageBuffer& img) {
  double sum = 0.0;
  for (const Rgb& p : img.pixels()) sum += luma(p);
  return sum / static_cast<double>(img.pixel_count());
}

double contrast(const ImageBuffer& img) {
  const double mean = brightness(img);
  double ss = 0.0;
  for (const Rgb& p : img.pixels()) {
    const double d = luma(p) - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(img.pixel_count()));
}

double sharpness(const ImageBuffer& img) {
  const int w = img.width(), h = img.height();
  if (w < 2 || h < 2) {
    throw ValidationError("sharpness needs at least a 2x2 image, got " + std::to_string(w) + "x" +
                          std::to_string(h));
  }
  const std::vector<double> y = luma_plane(img);
  double sum = 0.0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c + 1 < w; ++c) sum += std::abs(y[r * w + c + 1] - y[r * w + c]);
  for (int r = 0; r + 1 < h; ++r)
    for (int c = 0; c < w; ++c) sum += std::abs(y[(r + 1) * w + c] - y[r * w + c]);
  const double pairs = static_cast<double>((w - 1) * h + w * (h - 1));
  return sum / pairs;
}

double colorfulness(const ImageBuffer& img) {
  const double n = static_cast<double>(img.pixel_count());
  double mean_rg = 0.0, mean_yb = 0.0;
  for (const Rgb& p : img.pixels()) {
    mean_rg += p.r - p.g;
    mean_yb += 0.5 * (p.r + p.g) - p.b;
  }
  mean_rg /= n;
  mean_yb /= n;
  double var_rg = 0.0, var_yb = 0.0;
  for (const Rgb& p : img.pixels()) {
    const double drg = (p.r - p.g) - mean_rg;
    const double dyb = (0.5 * (p.r + p.g) - p.b) - mean_yb;
    var_rg += drg * drg;
    var_yb += dyb * dyb;
  }
  var_rg /= n;
  var_yb /= n;
  return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mean_rg * mean_rg + mean_yb * mean_yb);
}

double normalize(MetricKind metric, double raw) noexcept {
  double v = raw;
  switch (metric) {
    case MetricKind::Brightness:
      break;
    case MetricKind::Contrast:
      v = raw / kContrastScale;
      break;
    case MetricKind::Sharpness:
      v = raw / kSharpnessScale;
      break;
    case MetricKind::Colorfulness:
      v = raw / kColorfulnessScale;
      break;
  }
  return clamp_unit(v);
}

Level bin_level(MetricKind metric, double norm_value) {
  if (!(norm_value >= 0.0 && norm_value <= 1.0)) {
    throw ValidationError("normalized " + std::string(to_name(metric)) + " value " +
                          std::to_string(norm_value) + " is outside [0, 1]");
  }
  const BinThresholds t = thresholds(metric);
  if (norm_value < t.low) return Level::Low;
  if (norm_value < t.high) return Level::Medium;
  return Level::High;
}

const MetricValue& AppearanceProfile::get(MetricKind metric) const noexcept {
  switch (metric) {
    case MetricKind::Brightness:
      return brightness;
    case MetricKind::Contrast:
      return contrast;
    case MetricKind::Sharpness:
      return sharpness;
    case MetricKind::Colorfulness:
      break;
  }
  return colorfulness;
}

MetricValue& AppearanceProfile::get(MetricKind metric) noexcept {
  return const_cast<MetricValue&>(std::as_const(*this).get(metric));
}

AppearanceProfile profile(const ImageBuffer& img) {
  const double raw[4] = {brightness(img), contrast(img), sharpness(img), colorfulness(img)};
  AppearanceProfile out;
  for (std::size_t i = 0; i < kAllMetrics.size(); ++i) {
    const MetricKind m = kAllMetrics[i];
    MetricValue& v = out.get(m);
    v.raw = raw[i];
    v.norm = normalize(m, raw[i]);
    v.level = bin_level(m, v.norm);
  }
  return out;
}

}  // namespace tadac
