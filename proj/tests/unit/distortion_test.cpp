#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "tadac/distortion.hpp"
#include "tadac/errors.hpp"

namespace tadac {
namespace {

double mean_luma(const ImageBuffer& img) {
  double s = 0.0;
  for (double v : luma_plane(img)) s += v;
  return s / static_cast<double>(img.pixel_count());
}

// Variance of the luma change introduced by a distortion.
double residual_variance(const ImageBuffer& ref, const ImageBuffer& out) {
  const auto a = luma_plane(ref);
  const auto b = luma_plane(out);
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m += b[i] - a[i];
  m /= static_cast<double>(a.size());
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) v += (b[i] - a[i] - m) * (b[i] - a[i] - m);
  return v / static_cast<double>(a.size());
}

TEST(DistortionNames, RoundTripAndAreUnique) {
  std::set<std::string_view> names;
  for (DistortionType k : kAllDistortionTypes) {
    EXPECT_EQ(distortion_from_name(to_name(k)), k);
    names.insert(to_name(k));
  }
  EXPECT_EQ(names.size(), 19U);
  EXPECT_EQ(to_name(DistortionType::NonEccentricityPatch), "non_eccentricity_patch");
  EXPECT_THROW(distortion_from_name("sepia"), ValidationError);
}

TEST(DistortionLevels, OutsideOneToFiveThrows) {
  const ImageBuffer img = testing::structured_fixture();
  EXPECT_THROW(apply_distortion(img, {DistortionType::Blur, 0, 1}), ValidationError);
  EXPECT_THROW(apply_distortion(img, {DistortionType::Blur, 6, 1}), ValidationError);
  EXPECT_THROW(distortion_parameters(DistortionType::Noise, 9), ValidationError);
}

TEST(DistortionParameters, PrimaryGrowsWithSeverity) {
  for (DistortionType k : kAllDistortionTypes) {
    // JPEG quality and quantization levels fall as severity grows.
    const bool falling =
        k == DistortionType::JpegCompression || k == DistortionType::QuantizationDistortion;
    for (int l = 1; l < 5; ++l) {
      const double a = distortion_parameters(k, l).primary;
      const double b = distortion_parameters(k, l + 1).primary;
      if (falling) {
        EXPECT_GT(a, b) << to_name(k) << " level " << l;
      } else {
        EXPECT_LT(a, b) << to_name(k) << " level " << l;
      }
    }
  }
}

TEST(ApplyDistortion, PreservesSizeAndIsDeterministic) {
  const ImageBuffer img = testing::structured_fixture(48, 40);
  for (DistortionType k : kAllDistortionTypes)
    for (int l = 1; l <= 5; ++l) {
      const ImageBuffer a = apply_distortion(img, {k, l, 99});
      ASSERT_EQ(a.width(), img.width());
      ASSERT_EQ(a.height(), img.height());
      ASSERT_EQ(a, apply_distortion(img, {k, l, 99})) << to_name(k) << " " << l;
      for (const Rgb& p : a.pixels()) {
        ASSERT_TRUE(p.r >= 0 && p.r <= 1 && p.g >= 0 && p.g <= 1 && p.b >= 0 && p.b <= 1);
      }
    }
}

TEST(ApplyDistortion, StochasticKindsDependOnSeed) {
  const ImageBuffer img = testing::structured_fixture();
  for (DistortionType k : kAllDistortionTypes) {
    if (!is_stochastic(k)) continue;
    EXPECT_NE(apply_distortion(img, {k, 3, 1}), apply_distortion(img, {k, 3, 2})) << to_name(k);
  }
}

TEST(ApplyDistortion, EveryKindChangesTheImage) {
  const ImageBuffer img = testing::structured_fixture();
  for (DistortionType k : kAllDistortionTypes) {
    EXPECT_NE(apply_distortion(img, {k, 5, 4}), img) << to_name(k);
  }
}

TEST(ApplyDistortion, TooSmallImagesAreRejected) {
  const ImageBuffer tiny(4, 4, Rgb{0.5, 0.5, 0.5});
  for (DistortionType k : kAllDistortionTypes) {
    if (min_dimension(k) > 4) {
      EXPECT_THROW(apply_distortion(tiny, {k, 1, 0}), ValidationError) << to_name(k);
    }
  }
}

TEST(Monotonicity, NoiseVarianceRises) {
  const ImageBuffer img = testing::structured_fixture();
  for (DistortionType k : {DistortionType::Noise, DistortionType::ImpulseNoise}) {
    double prev = 0.0;
    for (int l = 1; l <= 5; ++l) {
      const double v = residual_variance(img, apply_distortion(img, {k, l, 42}));
      EXPECT_GT(v, prev) << to_name(k) << " level " << l;
      prev = v;
    }
  }
}

TEST(Monotonicity, BlurGradientEnergyFalls) {
  const ImageBuffer img = testing::structured_fixture();
  for (DistortionType k : {DistortionType::Blur, DistortionType::MotionBlur,
                           DistortionType::DenoisingRelated}) {
    double prev = gradient_energy(img);
    for (int l = 1; l <= 5; ++l) {
      const double g = gradient_energy(apply_distortion(img, {k, l, 42}));
      EXPECT_LT(g, prev) << to_name(k) << " level " << l;
      prev = g;
    }
  }
}

TEST(Monotonicity, BrightenAndDarkenMoveLuminance) {
  const ImageBuffer img = testing::structured_fixture();
  double up = mean_luma(img), down = up;
  for (int l = 1; l <= 5; ++l) {
    const double b = mean_luma(apply_distortion(img, {DistortionType::Brighten, l, 0}));
    const double d = mean_luma(apply_distortion(img, {DistortionType::Darken, l, 0}));
    EXPECT_GT(b, up);
    EXPECT_LT(d, down);
    up = b;
    down = d;
  }
}

TEST(Monotonicity, JpegKeepsFewerCoefficients) {
  const ImageBuffer img = testing::structured_fixture();
  std::size_t prev = SIZE_MAX;
  for (int l = 1; l <= 5; ++l) {
    const std::size_t n = jpeg_nonzero_coefficients(img, l);
    EXPECT_LT(n, prev);
    prev = n;
  }
}

TEST(Monotonicity, ColorChangeLeavesLumaMostlyAlone) {
  // Hue rotation and chroma diffusion act on colour, not brightness.
  const ImageBuffer img = testing::structured_fixture();
  const double base = mean_luma(img);
  for (int l = 1; l <= 5; ++l) {
    EXPECT_NEAR(mean_luma(apply_distortion(img, {DistortionType::ColorDiffusion, l, 0})), base,
                0.01);
  }
}

TEST(GradientEnergy, FlatImageHasNone) {
  EXPECT_EQ(gradient_energy(ImageBuffer(8, 8, Rgb{0.3, 0.3, 0.3})), 0.0);
  ImageBuffer step(2, 1);
  step.set(1, 0, {1, 1, 1});
  EXPECT_DOUBLE_EQ(gradient_energy(step), 1.0);
}

}  // namespace
}  // namespace tadac
