#include "tadac/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tadac/errors.hpp"
#include "tadac/rng.hpp"

namespace tadac {

namespace {

// (w+1) x (h+1) inclusive prefix sums.
std::vector<double> summed_area(std::span<const double> v, int w, int h) {
  const auto stride = static_cast<std::size_t>(w) + 1;
  std::vector<double> s(stride * (static_cast<std::size_t>(h) + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row = 0.0;
    for (int x = 0; x < w; ++x) {
      row += v[static_cast<std::size_t>(y) * w + x];
      s[(y + 1) * stride + x + 1] = s[y * stride + x + 1] + row;
    }
  }
  return s;
}

double box_sum(const std::vector<double>& s, int w, int x0, int y0, int x1, int y1) {
  const auto stride = static_cast<std::size_t>(w) + 1;
  return s[y1 * stride + x1] - s[y0 * stride + x1] - s[y1 * stride + x0] + s[y0 * stride + x0];
}

CropWindow random_window(CounterRng& rng, int width, int height, int side) {
  return {static_cast<int>(rng.below(static_cast<std::uint64_t>(width - side + 1))),
          static_cast<int>(rng.below(static_cast<std::uint64_t>(height - side + 1))), side};
}

}  // namespace

SaliencyMap::SaliencyMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ < 1 || height_ < 1) throw ValidationError("saliency map dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw ValidationError("saliency value count does not match its dimensions");
  }
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("saliency values must be finite and nonnegative");
    }
}

SaliencyMap SaliencyMap::from_image(const ImageBuffer& img) {
  return SaliencyMap(img.width(), img.height(), luma_plane(img));
}

CropWindow saliency_crop(const SaliencyMap& saliency, int side) {
  const int w = saliency.width(), h = saliency.height();
  if (side < 1 || side > std::min(w, h)) {
    throw ValidationError("crop side " + std::to_string(side) + " does not fit a " +
                          std::to_string(w) + "x" + std::to_string(h) + " saliency map");
  }
  const std::vector<double> s = summed_area(saliency.values(), w, h);
  const double tolerance = 1e-12 * box_sum(s, w, 0, 0, w, h);
  CropWindow best{0, 0, side};
  double best_sum = -1.0;
  for (int y = 0; y + side <= h; ++y)
    for (int x = 0; x + side <= w; ++x) {
      const double sum = box_sum(s, w, x, y, x + side, y + side);
      if (sum > best_sum + tolerance) {
        best_sum = sum;
        best = {x, y, side};
      }
    }
  return best;
}

CropWindow saliency_crop(const ImageBuffer& img, const SaliencyMap& saliency, int side) {
  if (img.width() != saliency.width() || img.height() != saliency.height()) {
    throw ValidationError("saliency map is " + std::to_string(saliency.width()) + "x" +
                          std::to_string(saliency.height()) + " but image is " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  return saliency_crop(saliency, side);
}

SaliencyMap saliency_proxy(const ImageBuffer& img, int radius) {
  const int w = img.width(), h = img.height();
  const std::vector<double> y = luma_plane(img);
  const std::vector<double> s = summed_area(y, w, h);
  std::vector<double> out(y.size());
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int x0 = std::max(0, c - radius), x1 = std::min(w, c + radius + 1);
      const int y0 = std::max(0, r - radius), y1 = std::min(h, r + radius + 1);
      const double mean = box_sum(s, w, x0, y0, x1, y1) / ((x1 - x0) * (y1 - y0));
      const double d = y[static_cast<std::size_t>(r) * w + c] - mean;
      out[static_cast<std::size_t>(r) * w + c] = d * d;
    }
  return SaliencyMap(w, h, std::move(out));
}

double overlap_fraction(const CropWindow& a, const CropWindow& b) {
  if (a.side != b.side || a.side < 1) throw ValidationError("overlap needs equal positive sides");
  const int ox = std::max(0, std::min(a.origin_x, b.origin_x) + a.side -
                                 std::max(a.origin_x, b.origin_x));
  const int oy = std::max(0, std::min(a.origin_y, b.origin_y) + a.side -
                                 std::max(a.origin_y, b.origin_y));
  return static_cast<double>(ox) * oy / (static_cast<double>(a.side) * a.side);
}

OverlapPair ola_pair(int width, int height, int side, std::uint64_t seed) {
  if (side < 1 || side > width || side > height) {
    throw ValidationError("crop side " + std::to_string(side) + " does not fit a " +
                          std::to_string(width) + "x" + std::to_string(height) + " image");
  }
  const int room_x = width - side;
  const int room_y = height - side;
  const int room = std::max(room_x, room_y);
  const double low = std::max(kMinOverlap, 1.0 - static_cast<double>(room) / side);
  if (low > kMaxOverlap) {
    throw ValidationError(std::to_string(width) + "x" + std::to_string(height) +
                          " image is too small for a 10-30% overlap pair of side " +
                          std::to_string(side));
  }
  CounterRng rng(seed);
  const double target = low + (kMaxOverlap - low) * rng.uniform();
  const int shift = static_cast<int>(std::lround(side * (1.0 - target)));

  const bool x_ok = room_x >= shift;
  const bool y_ok = room_y >= shift;
  const bool along_x = x_ok && y_ok ? (rng.next() & 1U) == 0 : x_ok;

  OverlapPair out;
  if (along_x) {
    const int ax = static_cast<int>(rng.below(static_cast<std::uint64_t>(room_x - shift + 1)));
    const int ay = static_cast<int>(rng.below(static_cast<std::uint64_t>(room_y + 1)));
    out.first = {ax, ay, side};
    out.second = {ax + shift, ay, side};
  } else {
    const int ax = static_cast<int>(rng.below(static_cast<std::uint64_t>(room_x + 1)));
    const int ay = static_cast<int>(rng.below(static_cast<std::uint64_t>(room_y - shift + 1)));
    out.first = {ax, ay, side};
    out.second = {ax, ay + shift, side};
  }
  out.overlap = overlap_fraction(out.first, out.second);
  return out;
}

OverlapPair ola_pair(const ImageBuffer& img, int side, std::uint64_t seed) {
  return ola_pair(img.width(), img.height(), side, seed);
}

std::string_view to_name(PairKind kind) noexcept {
  return kind == PairKind::ImageText ? "image_text" : "image_image";
}

std::string_view to_name(Polarity polarity) noexcept {
  return polarity == Polarity::Positive ? "positive" : "negative";
}

std::vector<PairRecord> build_pair_manifest(std::span<const PairSource> sources,
                                            const PairConfig& config) {
  if (sources.empty()) throw ValidationError("pair manifest needs at least one record");
  if (config.batch_size < 1) throw ValidationError("batch size must be positive");
  if (config.negatives && config.batch_size < 2) {
    throw ValidationError("negatives need a batch size of at least 2");
  }
  if (config.negatives && sources.size() < 2) {
    throw ValidationError("negative pairs need at least 2 records, got " +
                          std::to_string(sources.size()));
  }

  std::vector<const PairSource*> order;
  for (const PairSource& s : sources) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const PairSource* a, const PairSource* b) {
    return a->record.image_id < b->record.image_id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->record.image_id == order[i - 1]->record.image_id) {
      throw ValidationError("duplicate image_id '" + order[i]->record.image_id + "'");
    }
  }

  const std::size_t negatives = config.negatives ? config.batch_size - 1 : 0;
  std::vector<PairRecord> out;
  std::size_t batch = 0;

  for (std::size_t si = 0; si < order.size(); ++si) {
    const PairSource& src = *order[si];
    const std::string& id = src.record.image_id;
    CounterRng rng(derive_seed(config.seed, id, "pairs"));

    // Other records, optionally restricted to those with texts.
    auto pick_other = [&](bool need_text) -> const PairSource* {
      std::vector<std::size_t> pool;
      for (std::size_t j = 0; j < order.size(); ++j)
        if (j != si && (!need_text || !order[j]->record.texts.empty())) pool.push_back(j);
      if (pool.empty()) return nullptr;
      return order[pool[rng.below(pool.size())]];
    };

    if (config.image_text) {
      for (std::size_t t = 0; t < src.record.texts.size(); ++t) {
        PairRecord pos;
        pos.batch = batch;
        pos.kind = PairKind::ImageText;
        pos.polarity = Polarity::Positive;
        pos.left = {id, src.saliency_window};
        pos.right_text = TextRef{id, t, src.record.texts[t]};
        out.push_back(std::move(pos));
        for (std::size_t n = 0; n < negatives; ++n) {
          const PairSource* other = pick_other(true);
          if (other == nullptr) {
            throw ValidationError("no other record has texts to draw negatives from");
          }
          const std::size_t ti = rng.below(other->record.texts.size());
          PairRecord neg;
          neg.batch = batch;
          neg.kind = PairKind::ImageText;
          neg.polarity = Polarity::Negative;
          neg.left = {id, src.saliency_window};
          neg.right_text = TextRef{other->record.image_id, ti, other->record.texts[ti]};
          out.push_back(std::move(neg));
        }
        ++batch;
      }
    }

    if (config.image_image) {
      const OverlapPair ola = ola_pair(src.width, src.height, config.crop_side, rng.next());
      PairRecord pos;
      pos.batch = batch;
      pos.kind = PairKind::ImageImage;
      pos.polarity = Polarity::Positive;
      pos.left = {id, ola.first};
      pos.right_image = ImageRef{id, ola.second};
      pos.overlap_fraction = ola.overlap;
      out.push_back(std::move(pos));
      for (std::size_t n = 0; n < negatives; ++n) {
        const PairSource* other = pick_other(false);
        const CropWindow w = random_window(rng, other->width, other->height, config.crop_side);
        PairRecord neg;
        neg.batch = batch;
        neg.kind = PairKind::ImageImage;
        neg.polarity = Polarity::Negative;
        neg.left = {id, ola.first};
        neg.right_image = ImageRef{other->record.image_id, w};
        out.push_back(std::move(neg));
      }
      ++batch;
    }
  }
  return out;
}

PairAudit audit_pairs(std::span<const PairRecord> pairs, std::span<const PairSource> sources,
                      const PairConfig& config) {
  PairAudit audit;
  std::map<std::string, const PairSource*> by_id;
  for (const PairSource& s : sources) by_id[s.record.image_id] = &s;

  auto fail = [&](std::size_t i, const std::string& what) {
    audit.violations.push_back("pair " + std::to_string(i) + ": " + what);
  };
  auto check_crop = [&](std::size_t i, const ImageRef& ref) {
    const auto it = by_id.find(ref.image_id);
    if (it == by_id.end()) {
      fail(i, "unknown image '" + ref.image_id + "'");
      return;
    }
    if (ref.crop && !ref.crop->fits(it->second->width, it->second->height)) {
      fail(i, "crop out of bounds for '" + ref.image_id + "'");
    }
  };

  std::map<std::size_t, std::pair<std::size_t, std::size_t>> per_batch;  // positives, negatives
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PairRecord& p = pairs[i];
    auto& counts = per_batch[p.batch];
    const bool positive = p.polarity == Polarity::Positive;
    (positive ? counts.first : counts.second)++;
    (positive ? audit.positives : audit.negatives)++;
    check_crop(i, p.left);

    if (p.kind == PairKind::ImageText) {
      if (!p.right_text || p.right_image) {
        fail(i, "image_text pair must reference exactly one text");
        continue;
      }
      const TextRef& t = *p.right_text;
      const auto it = by_id.find(t.image_id);
      if (it == by_id.end() || t.text_index >= it->second->record.texts.size() ||
          it->second->record.texts[t.text_index] != t.text) {
        fail(i, "text reference does not resolve");
        continue;
      }
      if (positive && t.image_id != p.left.image_id) fail(i, "positive pair uses a foreign text");
      if (!positive && t.image_id == p.left.image_id) fail(i, "negative pair uses an own text");
    } else {
      if (!p.right_image || p.right_text) {
        fail(i, "image_image pair must reference exactly one image");
        continue;
      }
      check_crop(i, *p.right_image);
      if (positive) {
        if (p.right_image->image_id != p.left.image_id) {
          fail(i, "positive image pair spans two images");
        }
        if (!p.left.crop || !p.right_image->crop || !p.overlap_fraction) {
          fail(i, "positive image pair lacks crops or overlap");
          continue;
        }
        const double f = overlap_fraction(*p.left.crop, *p.right_image->crop);
        const double eps = 1.0 / p.left.crop->side;
        if (f != *p.overlap_fraction) fail(i, "recorded overlap does not match crops");
        if (f < kMinOverlap - eps || f > kMaxOverlap + eps) {
          fail(i, "overlap " + std::to_string(f) + " outside [0.10, 0.30]");
        }
      } else if (p.right_image->image_id == p.left.image_id) {
        fail(i, "negative image pair uses a single image");
      }
    }
  }
  const std::size_t want_neg = config.negatives ? config.batch_size - 1 : 0;
  for (const auto& [b, counts] : per_batch) {
    if (counts.first != 1 || counts.second != want_neg) {
      audit.violations.push_back("batch " + std::to_string(b) + " has " +
                                 std::to_string(counts.first) + " positives and " +
                                 std::to_string(counts.second) + " negatives");
    }
  }
  audit.batches = per_batch.size();
  return audit;
}

}  // namespace tadac
