#include "tadac/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tadac/errors.hpp"
#include "tadac/rng.hpp"

namespace tadac {

namespace {

struct TypeInfo {
  std::string_view name;
  std::string_view display;
};

constexpr std::array<TypeInfo, kDistortionTypeCount> kTypeInfo{{
    {"blur", "Blur"},
    {"motion_blur", "Motion Blur"},
    {"color_diffusion", "Color Diffusion"},
    {"color_change", "Color Change"},
    {"jpeg_compression", "JPEG Compression"},
    {"jpeg2000_compression", "JPEG2000 Compression"},
    {"noise", "Noise"},
    {"impulse_noise", "Impulse Noise"},
    {"darken", "Darken"},
    {"brighten", "Brighten"},
    {"jitter_distortion", "Jitter Distortion"},
    {"pixelate_distortion", "Pixelate Distortion"},
    {"non_eccentricity_patch", "Non-eccentricity Patch"},
    {"quantization_distortion", "Quantization Distortion"},
    {"denoising_related_distortion", "Denoising-related Distortion"},
    {"color_blocks", "Color Blocks"},
    {"sharpness", "Sharpness"},
    {"contrast", "Contrast"},
    {"uncomfortable_luminance_change", "Uncomfortable Luminance Change"},
}};

constexpr std::size_t slot(DistortionType kind) noexcept {
  return static_cast<std::size_t>(kind) - 1;
}

using Schedule = std::array<double, 5>;

struct TableRow {
  Schedule primary;
  Schedule secondary;
  std::string_view primary_name;
  std::string_view secondary_name;
};

constexpr Schedule kNone{0, 0, 0, 0, 0};

// Frozen severity table, one row per kind, columns are levels 1..5.
constexpr std::array<TableRow, kDistortionTypeCount> kTable{{
    {{0.8, 1.6, 2.4, 3.2, 4.0}, kNone, "gaussian_sigma_px", ""},
    {{3, 5, 9, 13, 19}, {45, 45, 45, 45, 45}, "kernel_length_px", "angle_deg"},
    {{1, 2, 4, 6, 8}, kNone, "chroma_sigma_px", ""},
    {{8, 16, 28, 42, 60}, {1.05, 1.1, 1.2, 1.3, 1.45}, "hue_rotation_deg", "chroma_gain"},
    {{60, 40, 20, 10, 4}, kNone, "jpeg_quality", ""},
    {{0.02, 0.05, 0.1, 0.2, 0.35}, {3, 3, 3, 3, 3}, "detail_step", "wavelet_levels"},
    {{0.02, 0.04, 0.07, 0.11, 0.16}, kNone, "noise_sigma", ""},
    {{0.01, 0.03, 0.06, 0.10, 0.16}, kNone, "flip_probability", ""},
    {{0.08, 0.16, 0.26, 0.38, 0.52}, {1.1, 1.25, 1.45, 1.7, 2.0}, "attenuation", "gamma"},
    {{0.08, 0.16, 0.26, 0.38, 0.52}, {1.1, 1.25, 1.45, 1.7, 2.0}, "attenuation", "gamma"},
    {{1, 2, 3, 4, 6}, kNone, "max_displacement_px", ""},
    {{2, 3, 4, 6, 8}, kNone, "block_px", ""},
    {{2, 4, 8, 12, 16}, {0.125, 0.125, 0.125, 0.125, 0.125}, "patch_count", "patch_fraction"},
    {{24, 12, 8, 5, 3}, kNone, "levels_per_channel", ""},
    {{0.02, 0.035, 0.05, 0.07, 0.09}, {0.8, 1.2, 1.6, 2.0, 2.5}, "noise_sigma", "smoothing_sigma_px"},
    {{2, 4, 6, 9, 12}, {0.1, 0.1, 0.1, 0.1, 0.1}, "block_count", "block_fraction"},
    {{0.6, 1.2, 2.0, 3.0, 4.5}, {1, 1, 1, 1, 1}, "unsharp_amount", "unsharp_sigma_px"},
    {{3, 5, 7, 10, 14}, kNone, "sigmoid_gain", ""},
    {{0.1, 0.2, 0.3, 0.45, 0.6}, kNone, "ramp_amplitude", ""},
}};

// Planar working copy; channels are unclamped until written back.
struct Planes {
  int w = 0;
  int h = 0;
  std::array<std::vector<double>, 3> c;

  explicit Planes(const ImageBuffer& img) : w(img.width()), h(img.height()) {
    for (auto& ch : c) ch.reserve(img.pixel_count());
    for (const Rgb& p : img.pixels()) {
      c[0].push_back(p.r);
      c[1].push_back(p.g);
      c[2].push_back(p.b);
    }
  }

  std::size_t idx(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
  }

  ImageBuffer image() const {
    std::vector<Rgb> px(c[0].size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = {c[0][i], c[1][i], c[2][i]};
    return ImageBuffer(w, h, std::move(px));
  }
};

int clampi(int v, int lo, int hi) noexcept { return std::min(std::max(v, lo), hi); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable convolution with clamp-to-edge borders.
void blur_plane(std::vector<double>& plane, int w, int h, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(plane.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * plane[y * w + clampi(x + i, 0, w - 1)];
      tmp[y * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[clampi(y + i, 0, h - 1) * w + x];
      plane[y * w + x] = acc;
    }
  }
}

void blur_all(Planes& p, double sigma) {
  for (auto& ch : p.c) blur_plane(ch, p.w, p.h, sigma);
}

// Full-range BT.601 (JFIF) transforms, chroma centered on zero.
void to_ycc(Planes& p) {
  for (std::size_t i = 0; i < p.c[0].size(); ++i) {
    const double r = p.c[0][i], g = p.c[1][i], b = p.c[2][i];
    p.c[0][i] = 0.299 * r + 0.587 * g + 0.114 * b;
    p.c[1][i] = -0.168736 * r - 0.331264 * g + 0.5 * b;
    p.c[2][i] = 0.5 * r - 0.418688 * g - 0.081312 * b;
  }
}

void from_ycc(Planes& p) {
  for (std::size_t i = 0; i < p.c[0].size(); ++i) {
    const double y = p.c[0][i], cb = p.c[1][i], cr = p.c[2][i];
    p.c[0][i] = y + 1.402 * cr;
    p.c[1][i] = y - 0.344136 * cb - 0.714136 * cr;
    p.c[2][i] = y + 1.772 * cb;
  }
}

ImageBuffer motion_blur(const ImageBuffer& img, int length) {
  Planes p(img);
  Planes out = p;
  const int half = length / 2;
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < p.w; ++x) {
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        // 45 degrees: step right and up together.
        for (int t = -half; t <= half; ++t) {
          acc += p.c[ch][p.idx(clampi(x + t, 0, p.w - 1), clampi(y - t, 0, p.h - 1))];
        }
        out.c[ch][out.idx(x, y)] = acc / (2 * half + 1);
      }
    }
  }
  return out.image();
}

ImageBuffer color_change(const ImageBuffer& img, double degrees, double gain) {
  Planes p(img);
  to_ycc(p);
  const double a = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(a), sn = std::sin(a);
  for (std::size_t i = 0; i < p.c[0].size(); ++i) {
    const double cb = p.c[1][i], cr = p.c[2][i];
    p.c[1][i] = gain * (cs * cb - sn * cr);
    p.c[2][i] = gain * (sn * cb + cs * cr);
  }
  from_ycc(p);
  return p.image();
}

// --- JPEG emulation -------------------------------------------------------

constexpr std::array<int, 64> kLumaQuant{
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaQuant{
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99,
    99, 99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

std::array<double, 64> scaled_table(const std::array<int, 64>& base, int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> out{};
  for (int i = 0; i < 64; ++i) out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return out;
}

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> b{};
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      for (int x = 0; x < 8; ++x) {
        b[u * 8 + x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return b;
  }();
  return basis;
}

// Quantizes one 8x8 block in place (samples on the 0..255 scale, level-shifted).
std::size_t jpeg_block(std::array<double, 64>& block, const std::array<double, 64>& q) {
  const auto& basis = dct_basis();
  std::array<double, 64> tmp{}, coef{};
  for (int u = 0; u < 8; ++u)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int y = 0; y < 8; ++y) s += basis[u * 8 + y] * block[x * 8 + y];
      tmp[x * 8 + u] = s;  // rows transformed
    }
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += basis[v * 8 + x] * tmp[x * 8 + u];
      coef[v * 8 + u] = s;
    }
  std::size_t nonzero = 0;
  for (int i = 0; i < 64; ++i) {
    const double level = std::round(coef[i] / q[i]);
    if (level != 0.0) ++nonzero;
    coef[i] = level * q[i];
  }
  for (int v = 0; v < 8; ++v)
    for (int u = 0; u < 8; ++u) {
      double s = 0.0;
      for (int x = 0; x < 8; ++x) s += basis[x * 8 + v] * coef[x * 8 + u];
      tmp[v * 8 + u] = s;
    }
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      double s = 0.0;
      for (int u = 0; u < 8; ++u) s += basis[u * 8 + y] * tmp[x * 8 + u];
      block[x * 8 + y] = s;
    }
  return nonzero;
}

std::size_t jpeg_emulate(Planes& p, int quality) {
  to_ycc(p);
  const std::array<double, 64> tables[2] = {scaled_table(kLumaQuant, quality),
                                            scaled_table(kChromaQuant, quality)};
  std::size_t nonzero = 0;
  for (int ch = 0; ch < 3; ++ch) {
    const auto& q = tables[ch == 0 ? 0 : 1];
    const double shift = ch == 0 ? 128.0 : 0.0;
    for (int by = 0; by < p.h; by += 8) {
      for (int bx = 0; bx < p.w; bx += 8) {
        std::array<double, 64> block{};
        for (int y = 0; y < 8; ++y)
          for (int x = 0; x < 8; ++x) {
            block[y * 8 + x] =
                255.0 * p.c[ch][p.idx(std::min(bx + x, p.w - 1), std::min(by + y, p.h - 1))] -
                shift;
          }
        nonzero += jpeg_block(block, q);
        for (int y = 0; y < 8 && by + y < p.h; ++y)
          for (int x = 0; x < 8 && bx + x < p.w; ++x) {
            p.c[ch][p.idx(bx + x, by + y)] = (block[y * 8 + x] + shift) / 255.0;
          }
      }
    }
  }
  from_ycc(p);
  return nonzero;
}

// --- JPEG2000 emulation: Haar wavelet with quantized detail bands ----------

void haar_quantize_plane(std::vector<double>& plane, int w, int h, int levels, double step) {
  const int unit = 1 << levels;
  const int pw = (w + unit - 1) / unit * unit;
  const int ph = (h + unit - 1) / unit * unit;
  std::vector<double> a(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) a[y * pw + x] = plane[std::min(y, h - 1) * w + std::min(x, w - 1)];

  const double s = std::numbers::sqrt2 / 2.0;
  auto quant = [step](double v) { return std::round(v / step) * step; };
  std::vector<double> line;
  int cw = pw, ch = ph;
  for (int l = 0; l < levels; ++l) {
    for (int y = 0; y < ch; ++y) {
      line.assign(cw, 0.0);
      for (int x = 0; x < cw / 2; ++x) {
        line[x] = s * (a[y * pw + 2 * x] + a[y * pw + 2 * x + 1]);
        line[cw / 2 + x] = s * (a[y * pw + 2 * x] - a[y * pw + 2 * x + 1]);
      }
      for (int x = 0; x < cw; ++x) a[y * pw + x] = line[x];
    }
    for (int x = 0; x < cw; ++x) {
      line.assign(ch, 0.0);
      for (int y = 0; y < ch / 2; ++y) {
        line[y] = s * (a[2 * y * pw + x] + a[(2 * y + 1) * pw + x]);
        line[ch / 2 + y] = s * (a[2 * y * pw + x] - a[(2 * y + 1) * pw + x]);
      }
      for (int y = 0; y < ch; ++y) a[y * pw + x] = line[y];
    }
    cw /= 2;
    ch /= 2;
  }
  // Approximation band (top-left cw x ch) passes through untouched.
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x)
      if (x >= cw || y >= ch) a[y * pw + x] = quant(a[y * pw + x]);

  for (int l = 0; l < levels; ++l) {
    cw *= 2;
    ch *= 2;
    for (int x = 0; x < cw; ++x) {
      line.assign(ch, 0.0);
      for (int y = 0; y < ch / 2; ++y) {
        const double lo = a[y * pw + x], hi = a[(ch / 2 + y) * pw + x];
        line[2 * y] = s * (lo + hi);
        line[2 * y + 1] = s * (lo - hi);
      }
      for (int y = 0; y < ch; ++y) a[y * pw + x] = line[y];
    }
    for (int y = 0; y < ch; ++y) {
      line.assign(cw, 0.0);
      for (int x = 0; x < cw / 2; ++x) {
        const double lo = a[y * pw + x], hi = a[y * pw + cw / 2 + x];
        line[2 * x] = s * (lo + hi);
        line[2 * x + 1] = s * (lo - hi);
      }
      for (int x = 0; x < cw; ++x) a[y * pw + x] = line[x];
    }
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) plane[y * w + x] = a[y * pw + x];
}

// --- Remaining pixel procedures ------------------------------------------

ImageBuffer add_gaussian_noise(const ImageBuffer& img, double sigma, std::uint64_t seed) {
  Planes p(img);
  CounterRng rng(seed);
  for (std::size_t i = 0; i < p.c[0].size(); ++i)
    for (auto& ch : p.c) ch[i] += sigma * rng.normal();
  return p.image();
}

ImageBuffer impulse_noise(const ImageBuffer& img, double prob, std::uint64_t seed) {
  Planes p(img);
  const CounterRng rng(seed);
  for (std::size_t i = 0; i < p.c[0].size(); ++i) {
    if (rng.uniform_at(2 * i) < prob) {
      const double v = (rng.at(2 * i + 1) & 1U) ? 1.0 : 0.0;
      for (auto& ch : p.c) ch[i] = v;
    }
  }
  return p.image();
}

ImageBuffer exposure(const ImageBuffer& img, double attenuation, double gamma, bool brighten) {
  Planes p(img);
  for (auto& ch : p.c)
    for (double& v : ch) {
      v = brighten ? 1.0 - std::pow(1.0 - v, gamma) * (1.0 - attenuation)
                   : std::pow(v, gamma) * (1.0 - attenuation);
    }
  return p.image();
}

ImageBuffer jitter(const ImageBuffer& img, int max_disp, std::uint64_t seed) {
  const CounterRng rng(seed);
  const auto span = static_cast<std::uint64_t>(2 * max_disp + 1);
  ImageBuffer out = img;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const auto i = static_cast<std::uint64_t>(y) * img.width() + x;
      auto draw = [&](std::uint64_t c) {
        return static_cast<int>((static_cast<uint128>(rng.at(c)) * span) >> 64) -
               max_disp;
      };
      const int sx = clampi(x + draw(2 * i), 0, img.width() - 1);
      const int sy = clampi(y + draw(2 * i + 1), 0, img.height() - 1);
      out.set(x, y, img.at(sx, sy));
    }
  return out;
}

ImageBuffer pixelate(const ImageBuffer& img, int block) {
  ImageBuffer out = img;
  for (int by = 0; by < img.height(); by += block)
    for (int bx = 0; bx < img.width(); bx += block) {
      const int ex = std::min(bx + block, img.width());
      const int ey = std::min(by + block, img.height());
      Rgb acc{};
      for (int y = by; y < ey; ++y)
        for (int x = bx; x < ex; ++x) {
          acc.r += img.at(x, y).r;
          acc.g += img.at(x, y).g;
          acc.b += img.at(x, y).b;
        }
      const double n = static_cast<double>((ex - bx) * (ey - by));
      const Rgb mean{acc.r / n, acc.g / n, acc.b / n};
      for (int y = by; y < ey; ++y)
        for (int x = bx; x < ex; ++x) out.set(x, y, mean);
    }
  return out;
}

int fraction_side(const ImageBuffer& img, double fraction) {
  return std::max(2, static_cast<int>(std::lround(std::min(img.width(), img.height()) * fraction)));
}

ImageBuffer displaced_patches(const ImageBuffer& img, int count, double fraction,
                              std::uint64_t seed) {
  CounterRng rng(seed);
  const int side = fraction_side(img, fraction);
  ImageBuffer out = img;
  for (int n = 0; n < count; ++n) {
    const int sx = static_cast<int>(rng.below(img.width() - side + 1));
    const int sy = static_cast<int>(rng.below(img.height() - side + 1));
    const int dx = clampi(sx + static_cast<int>(rng.below(2 * side + 1)) - side, 0,
                          img.width() - side);
    const int dy = clampi(sy + static_cast<int>(rng.below(2 * side + 1)) - side, 0,
                          img.height() - side);
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) out.set(dx + x, dy + y, img.at(sx + x, sy + y));
  }
  return out;
}

ImageBuffer color_blocks(const ImageBuffer& img, int count, double fraction, std::uint64_t seed) {
  CounterRng rng(seed);
  const int side = fraction_side(img, fraction);
  ImageBuffer out = img;
  for (int n = 0; n < count; ++n) {
    const int ox = static_cast<int>(rng.below(img.width() - side + 1));
    const int oy = static_cast<int>(rng.below(img.height() - side + 1));
    const Rgb color{rng.uniform(), rng.uniform(), rng.uniform()};
    for (int y = 0; y < side; ++y)
      for (int x = 0; x < side; ++x) out.set(ox + x, oy + y, color);
  }
  return out;
}

ImageBuffer quantize_colors(const ImageBuffer& img, int levels) {
  Planes p(img);
  const double steps = levels - 1;
  for (auto& ch : p.c)
    for (double& v : ch) v = std::round(v * steps) / steps;
  return p.image();
}

ImageBuffer unsharp(const ImageBuffer& img, double amount, double sigma) {
  Planes p(img);
  Planes soft = p;
  blur_all(soft, sigma);
  for (int ch = 0; ch < 3; ++ch)
    for (std::size_t i = 0; i < p.c[ch].size(); ++i)
      p.c[ch][i] += amount * (p.c[ch][i] - soft.c[ch][i]);
  return p.image();
}

ImageBuffer sigmoid_contrast(const ImageBuffer& img, double gain) {
  auto sig = [gain](double v) { return 1.0 / (1.0 + std::exp(-gain * (v - 0.5))); };
  const double lo = sig(0.0), hi = sig(1.0);
  Planes p(img);
  for (auto& ch : p.c)
    for (double& v : ch) v = (sig(v) - lo) / (hi - lo);
  return p.image();
}

ImageBuffer luminance_ramp(const ImageBuffer& img, double amplitude) {
  Planes p(img);
  const double span = std::max(1, p.w - 1);
  for (int y = 0; y < p.h; ++y)
    for (int x = 0; x < p.w; ++x) {
      const double factor = 1.0 + amplitude * (2.0 * x / span - 1.0);
      for (auto& ch : p.c) ch[p.idx(x, y)] *= factor;
    }
  return p.image();
}

}  // namespace

std::string_view to_name(DistortionType kind) noexcept { return kTypeInfo[slot(kind)].name; }

std::string_view display_name(DistortionType kind) noexcept {
  return kTypeInfo[slot(kind)].display;
}

DistortionType distortion_from_name(std::string_view name) {
  for (DistortionType kind : kAllDistortionTypes) {
    if (to_name(kind) == name) return kind;
  }
  throw ValidationError("unknown distortion type '" + std::string(name) + "'");
}

void check_level(int level) {
  if (level < kMinLevel || level > kMaxLevel) {
    throw ValidationError("distortion level must be in [1, 5], got " + std::to_string(level));
  }
}

ParameterSet distortion_parameters(DistortionType kind, int level) {
  check_level(level);
  const TableRow& row = kTable[slot(kind)];
  return {row.primary[level - 1], row.secondary[level - 1], row.primary_name, row.secondary_name};
}

bool is_stochastic(DistortionType kind) noexcept {
  switch (kind) {
    case DistortionType::Noise:
    case DistortionType::ImpulseNoise:
    case DistortionType::JitterDistortion:
    case DistortionType::NonEccentricityPatch:
    case DistortionType::DenoisingRelated:
    case DistortionType::ColorBlocks:
      return true;
    default:
      return false;
  }
}

int min_dimension(DistortionType kind) noexcept {
  switch (kind) {
    case DistortionType::Blur:
    case DistortionType::MotionBlur:
    case DistortionType::ColorDiffusion:
    case DistortionType::JpegCompression:
    case DistortionType::Jpeg2000Compression:
    case DistortionType::PixelateDistortion:
    case DistortionType::NonEccentricityPatch:
    case DistortionType::DenoisingRelated:
    case DistortionType::ColorBlocks:
    case DistortionType::Sharpness:
      return 8;
    default:
      return 1;
  }
}

ImageBuffer apply_distortion(const ImageBuffer& img, const DistortionSpec& spec) {
  const ParameterSet ps = distortion_parameters(spec.kind, spec.level);
  const int min_dim = min_dimension(spec.kind);
  if (img.width() < min_dim || img.height() < min_dim) {
    throw ValidationError(std::string(to_name(spec.kind)) + " needs at least " +
                          std::to_string(min_dim) + "x" + std::to_string(min_dim) + " pixels");
  }
  const double a = ps.primary;
  const double b = ps.secondary;
  const std::uint64_t seed = mix64(spec.seed ^ (static_cast<std::uint64_t>(spec.kind) << 8 |
                                                static_cast<std::uint64_t>(spec.level)));
  switch (spec.kind) {
    case DistortionType::Blur: {
      Planes p(img);
      blur_all(p, a);
      return p.image();
    }
    case DistortionType::MotionBlur:
      return motion_blur(img, static_cast<int>(a));
    case DistortionType::ColorDiffusion: {
      Planes p(img);
      to_ycc(p);
      blur_plane(p.c[1], p.w, p.h, a);
      blur_plane(p.c[2], p.w, p.h, a);
      from_ycc(p);
      return p.image();
    }
    case DistortionType::ColorChange:
      return color_change(img, a, b);
    case DistortionType::JpegCompression: {
      Planes p(img);
      jpeg_emulate(p, static_cast<int>(a));
      return p.image();
    }
    case DistortionType::Jpeg2000Compression: {
      Planes p(img);
      to_ycc(p);
      for (auto& ch : p.c) haar_quantize_plane(ch, p.w, p.h, static_cast<int>(b), a);
      from_ycc(p);
      return p.image();
    }
    case DistortionType::Noise:
      return add_gaussian_noise(img, a, seed);
    case DistortionType::ImpulseNoise:
      return impulse_noise(img, a, seed);
    case DistortionType::Darken:
      return exposure(img, a, b, false);
    case DistortionType::Brighten:
      return exposure(img, a, b, true);
    case DistortionType::JitterDistortion:
      return jitter(img, static_cast<int>(a), seed);
    case DistortionType::PixelateDistortion:
      return pixelate(img, static_cast<int>(a));
    case DistortionType::NonEccentricityPatch:
      return displaced_patches(img, static_cast<int>(a), b, seed);
    case DistortionType::QuantizationDistortion:
      return quantize_colors(img, static_cast<int>(a));
    case DistortionType::DenoisingRelated: {
      Planes p(add_gaussian_noise(img, a, seed));
      blur_all(p, b);
      return p.image();
    }
    case DistortionType::ColorBlocks:
      return color_blocks(img, static_cast<int>(a), b, seed);
    case DistortionType::Sharpness:
      return unsharp(img, a, b);
    case DistortionType::Contrast:
      return sigmoid_contrast(img, a);
    case DistortionType::UncomfortableLuminanceChange:
      return luminance_ramp(img, a);
  }
  throw ValidationError("unhandled distortion kind");
}

std::size_t jpeg_nonzero_coefficients(const ImageBuffer& img, int level) {
  const ParameterSet ps = distortion_parameters(DistortionType::JpegCompression, level);
  Planes p(img);
  return jpeg_emulate(p, static_cast<int>(ps.primary));
}

double gradient_energy(const ImageBuffer& img) {
  const std::vector<double> y = luma_plane(img);
  const int w = img.width(), h = img.height();
  double e = 0.0;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) {
        const double d = y[r * w + c + 1] - y[r * w + c];
        e += d * d;
      }
      if (r + 1 < h) {
        const double d = y[(r + 1) * w + c] - y[r * w + c];
        e += d * d;
      }
    }
  return e;
}

}  // namespace tadac
