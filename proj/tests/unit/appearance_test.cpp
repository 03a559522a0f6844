#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tadac/appearance.hpp"
#include "tadac/errors.hpp"

namespace tadac {
namespace {

ImageBuffer halves(Rgb left, Rgb right, int w = 8, int h = 4) {
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, x < w / 2 ? left : right);
  return img;
}

// Straight re-evaluation of the four formulas, kept independent of the
// library's code paths.
struct Oracle {
  double br, ct, sh, cl;
};

Oracle oracle(const ImageBuffer& img) {
  const int w = img.width(), h = img.height();
  std::vector<double> y;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) {
      const Rgb& p = img.at(i, j);
      y.push_back(0.299 * p.r + 0.587 * p.g + 0.114 * p.b);
    }
  const double n = static_cast<double>(y.size());
  double mean = 0.0;
  for (double v : y) mean += v / n;
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean) / n;
  double grad = 0.0;
  for (int j = 0; j < h; ++j)
    for (int i = 0; i + 1 < w; ++i) grad += std::fabs(y[j * w + i + 1] - y[j * w + i]);
  for (int j = 0; j + 1 < h; ++j)
    for (int i = 0; i < w; ++i) grad += std::fabs(y[(j + 1) * w + i] - y[j * w + i]);
  const double pairs = (w - 1.0) * h + w * (h - 1.0);
  double mrg = 0, myb = 0;
  for (const Rgb& p : img.pixels()) {
    mrg += (p.r - p.g) / n;
    myb += (0.5 * (p.r + p.g) - p.b) / n;
  }
  double vrg = 0, vyb = 0;
  for (const Rgb& p : img.pixels()) {
    vrg += std::pow(p.r - p.g - mrg, 2) / n;
    vyb += std::pow(0.5 * (p.r + p.g) - p.b - myb, 2) / n;
  }
  const double cl = std::sqrt(vrg + vyb) + 0.3 * std::sqrt(mrg * mrg + myb * myb);
  return {mean, std::sqrt(var), grad / pairs, cl};
}

TEST(Brightness, KnownColours) {
  EXPECT_NEAR(brightness(testing::solid(4, 4, {1, 1, 1})), 1.0, 1e-12);
  EXPECT_NEAR(brightness(testing::solid(4, 4, {1, 0, 0})), 0.299, 1e-12);
  EXPECT_EQ(brightness(testing::solid(4, 4, {0, 0, 0})), 0.0);
}

TEST(Contrast, KnownDistributions) {
  EXPECT_NEAR(contrast(testing::solid(5, 3, {0.4, 0.4, 0.4})), 0.0, 1e-12);
  EXPECT_NEAR(contrast(halves({0, 0, 0}, {1, 1, 1})), 0.5, 1e-12);
  ImageBuffer two(2, 1);
  two.set(0, 0, {0.25, 0.25, 0.25});
  two.set(1, 0, {0.75, 0.75, 0.75});
  EXPECT_NEAR(contrast(two), 0.25, 1e-12);
}

TEST(Sharpness, ConstantCheckerboardAndRamp) {
  EXPECT_EQ(sharpness(testing::solid(6, 6, {0.7, 0.7, 0.7})), 0.0);
  ImageBuffer checker(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      const double v = (x + y) % 2;
      checker.set(x, y, {v, v, v});
    }
  EXPECT_NEAR(sharpness(checker), 1.0, 1e-12);
  EXPECT_NEAR(normalize(MetricKind::Sharpness, sharpness(checker)), 1.0, 1e-12);

  ImageBuffer ramp(8, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) ramp.set(x, y, {x / 7.0, x / 7.0, x / 7.0});
  // 56 horizontal steps of 1/7 over 112 neighbour pairs.
  EXPECT_NEAR(sharpness(ramp), 1.0 / 14.0, 1e-12);
  EXPECT_THROW(sharpness(ImageBuffer(1, 5)), ValidationError);
}

TEST(Colorfulness, OpponentFormula) {
  EXPECT_NEAR(colorfulness(testing::solid(4, 4, {0.3, 0.3, 0.3})), 0.0, 1e-12);
  EXPECT_NEAR(colorfulness(halves({0.1, 0.1, 0.1}, {0.9, 0.9, 0.9})), 0.0, 1e-12);
  EXPECT_NEAR(colorfulness(testing::solid(4, 4, {1, 0, 0})), 0.3 * std::sqrt(1.25), 1e-12);
  // rg = +-1 with mean 0, yb = 0.5 everywhere: 1 + 0.3 * 0.5.
  const ImageBuffer rg = halves({1, 0, 0}, {0, 1, 0});
  EXPECT_NEAR(colorfulness(rg), 1.15, 1e-12);
  EXPECT_NEAR(colorfulness(rg), oracle(rg).cl, 1e-12);
  EXPECT_EQ(normalize(MetricKind::Colorfulness, colorfulness(rg)), 1.0);
}

TEST(BinLevel, ThresholdsAreHalfOpen) {
  struct Case {
    MetricKind m;
    double a, b;
  };
  const Case cases[] = {{MetricKind::Brightness, 0.40, 0.55},
                        {MetricKind::Contrast, 0.40, 0.60},
                        {MetricKind::Sharpness, 0.10, 0.21},
                        {MetricKind::Colorfulness, 0.15, 0.25}};
  for (const Case& c : cases) {
    EXPECT_EQ(bin_level(c.m, 0.0), Level::Low);
    EXPECT_EQ(bin_level(c.m, std::nextafter(c.a, 0.0)), Level::Low);
    EXPECT_EQ(bin_level(c.m, c.a), Level::Medium);
    EXPECT_EQ(bin_level(c.m, std::nextafter(c.b, 0.0)), Level::Medium);
    EXPECT_EQ(bin_level(c.m, c.b), Level::High);
    EXPECT_EQ(bin_level(c.m, 1.0), Level::High);
    EXPECT_THROW(bin_level(c.m, -0.01), ValidationError);
    EXPECT_THROW(bin_level(c.m, 1.01), ValidationError);
    const BinThresholds t = thresholds(c.m);
    EXPECT_EQ(t.low, c.a);
    EXPECT_EQ(t.high, c.b);
  }
  EXPECT_EQ(bin_level(MetricKind::Brightness, 0.40), Level::Medium);
  EXPECT_EQ(bin_level(MetricKind::Sharpness, 0.05), Level::Low);
  EXPECT_EQ(bin_level(MetricKind::Colorfulness, 1.0), Level::High);
}

TEST(Profile, MidGrayAndBlack) {
  const AppearanceProfile gray = profile(testing::solid(16, 16, {0.5, 0.5, 0.5}));
  EXPECT_NEAR(gray.brightness.norm, 0.5, 1e-12);
  EXPECT_EQ(gray.brightness.level, Level::Medium);
  EXPECT_EQ(gray.contrast.level, Level::Low);
  EXPECT_EQ(gray.sharpness.level, Level::Low);
  EXPECT_EQ(gray.colorfulness.level, Level::Low);

  const AppearanceProfile black = profile(testing::solid(16, 16, {0, 0, 0}));
  for (MetricKind m : kAllMetrics) {
    EXPECT_EQ(black.get(m).norm, 0.0);
    EXPECT_EQ(black.get(m).level, Level::Low);
  }
}

TEST(Profile, MatchesIndependentOracle) {
  const ImageBuffer img = testing::structured_fixture();
  const AppearanceProfile p = profile(img);
  const Oracle o = oracle(img);
  EXPECT_NEAR(p.brightness.raw, o.br, 1e-12);
  EXPECT_NEAR(p.contrast.raw, o.ct, 1e-12);
  EXPECT_NEAR(p.sharpness.raw, o.sh, 1e-12);
  EXPECT_NEAR(p.colorfulness.raw, o.cl, 1e-12);
  for (MetricKind m : kAllMetrics) {
    const MetricValue& v = p.get(m);
    EXPECT_GE(v.norm, 0.0);
    EXPECT_LE(v.norm, 1.0);
    EXPECT_EQ(v.level, bin_level(m, v.norm));
  }
}

TEST(Profile, NormsStayInUnitRangeOnRandomImages) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const AppearanceProfile p = profile(testing::quantized_noise_image(9, 7, seed));
    for (MetricKind m : kAllMetrics) {
      ASSERT_GE(p.get(m).norm, 0.0);
      ASSERT_LE(p.get(m).norm, 1.0);
    }
  }
}

TEST(MetricNames, RoundTrip) {
  for (MetricKind m : kAllMetrics) EXPECT_EQ(metric_from_name(to_name(m)), m);
  for (Level l : {Level::Low, Level::Medium, Level::High}) EXPECT_EQ(level_from_name(to_name(l)), l);
  EXPECT_THROW(metric_from_name("hue"), ValidationError);
}

}  // namespace
}  // namespace tadac
