#include "tadac/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tadac/errors.hpp"

namespace tadac {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " contains a non-finite value");
}

void check_inputs(std::span<const double> query, const EmbeddingBatch& keys,
                  std::size_t positive_index, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be positive and finite");
  }
  if (keys.rows() == 0) throw ValidationError("info_nce needs at least one key");
  if (positive_index >= keys.rows()) {
    throw ValidationError("positive index " + std::to_string(positive_index) +
                          " out of range for " + std::to_string(keys.rows()) + " keys");
  }
  if (query.size() != keys.dim()) {
    throw ValidationError("query dimension " + std::to_string(query.size()) +
                          " does not match key dimension " + std::to_string(keys.dim()));
  }
  require_finite(query, "query");
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Logits q.k_i / tau and their softmax weights.
std::vector<double> softmax_weights(std::span<const double> query, const EmbeddingBatch& keys,
                                    double temperature, std::vector<double>& logits) {
  logits.resize(keys.rows());
  for (std::size_t i = 0; i < keys.rows(); ++i) logits[i] = dot(query, keys.row(i)) / temperature;
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(keys.rows());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += p[i] = std::exp(logits[i] - peak);
  for (double& v : p) v /= z;
  return p;
}

EmbeddingBatch gather(const EmbeddingBatch& src, const std::vector<std::size_t>& rows) {
  std::vector<double> values;
  values.reserve(rows.size() * src.dim());
  for (std::size_t r : rows) {
    if (r >= src.rows()) {
      throw ValidationError("batch layout references row " + std::to_string(r) + " of " +
                            std::to_string(src.rows()));
    }
    const auto row = src.row(r);
    values.insert(values.end(), row.begin(), row.end());
  }
  return EmbeddingBatch(rows.size(), src.dim(), std::move(values));
}

double layout_loss(const EmbeddingBatch& left, const EmbeddingBatch& right,
                   std::span<const PairBatch> batches, double temperature,
                   LossDirection direction) {
  if (left.dim() != right.dim()) {
    throw ValidationError("embedding dimensions differ: " + std::to_string(left.dim()) + " vs " +
                          std::to_string(right.dim()));
  }
  double total = 0.0;
  for (const PairBatch& b : batches) {
    if (b.left_rows.empty() || b.left_rows.size() != b.right_rows.size()) {
      throw ValidationError("malformed batch: left/right row lists must be nonempty and aligned");
    }
    if (b.positive >= b.left_rows.size()) {
      throw ValidationError("malformed batch: positive index out of range");
    }
    const EmbeddingBatch right_keys = gather(right, b.right_rows);
    const EmbeddingBatch left_keys = gather(left, b.left_rows);
    total += info_nce(left_keys.row(b.positive), right_keys, b.positive, temperature);
    if (direction == LossDirection::Symmetric) {
      total += info_nce(right_keys.row(b.positive), left_keys, b.positive, temperature);
    }
  }
  return total;
}

double norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

}  // namespace

EmbeddingBatch::EmbeddingBatch(std::size_t rows, std::size_t dim, std::vector<double> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
  if (values_.size() != rows_ * dim_) {
    throw ValidationError("embedding matrix has " + std::to_string(values_.size()) +
                          " values, expected " + std::to_string(rows_ * dim_));
  }
  require_finite(values_, "embedding batch");
}

EmbeddingBatch EmbeddingBatch::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ValidationError("embedding batch needs at least one row");
  const std::size_t dim = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (r.size() != dim) throw ValidationError("ragged embedding rows");
    values.insert(values.end(), r.begin(), r.end());
  }
  return EmbeddingBatch(rows.size(), dim, std::move(values));
}

void LossConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError("temperature must be positive");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
}

double info_nce(std::span<const double> query, const EmbeddingBatch& keys,
                std::size_t positive_index, double temperature) {
  check_inputs(query, keys, positive_index, temperature);
  std::vector<double> logits(keys.rows());
  for (std::size_t i = 0; i < keys.rows(); ++i) logits[i] = dot(query, keys.row(i)) / temperature;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - peak);
  // -log(exp(l+ - peak) / z)
  return std::log(z) - (logits[positive_index] - peak);
}

std::vector<double> info_nce_grad_q(std::span<const double> query, const EmbeddingBatch& keys,
                                    std::size_t positive_index, double temperature) {
  check_inputs(query, keys, positive_index, temperature);
  std::vector<double> logits;
  const std::vector<double> p = softmax_weights(query, keys, temperature, logits);
  std::vector<double> grad(keys.dim(), 0.0);
  for (std::size_t i = 0; i < keys.rows(); ++i) {
    const double w = i == positive_index ? p[i] - 1.0 : p[i];
    const auto k = keys.row(i);
    for (std::size_t d = 0; d < grad.size(); ++d) grad[d] += w * k[d];
  }
  for (double& g : grad) g /= temperature;
  return grad;
}

double batch_loss_l1(const EmbeddingBatch& image_embs, const EmbeddingBatch& text_embs,
                     std::span<const PairBatch> batches, double temperature,
                     LossDirection direction) {
  return layout_loss(image_embs, text_embs, batches, temperature, direction);
}

double batch_loss_l2(const EmbeddingBatch& crops_a, const EmbeddingBatch& crops_b,
                     std::span<const PairBatch> batches, double temperature,
                     LossDirection direction) {
  return layout_loss(crops_a, crops_b, batches, temperature, direction);
}

double joint_loss(double l1, double l2, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  return (1.0 - alpha) * l1 + alpha * l2;
}

std::vector<PairBatch> consecutive_batches(std::size_t rows, std::size_t batch_size,
                                           std::size_t positive_offset) {
  if (batch_size == 0 || rows % batch_size != 0) {
    throw ValidationError("row count " + std::to_string(rows) +
                          " is not a positive multiple of batch size " +
                          std::to_string(batch_size));
  }
  if (positive_offset >= batch_size) throw ValidationError("positive offset exceeds batch size");
  std::vector<PairBatch> out;
  for (std::size_t start = 0; start < rows; start += batch_size) {
    PairBatch b;
    for (std::size_t i = 0; i < batch_size; ++i) {
      b.left_rows.push_back(start + i);
      b.right_rows.push_back(start + i);
    }
    b.positive = positive_offset;
    out.push_back(std::move(b));
  }
  return out;
}

GradientCheckResult check_info_nce_gradient(std::span<const double> query,
                                            const EmbeddingBatch& keys,
                                            std::size_t positive_index, double temperature,
                                            double step) {
  GradientCheckResult r;
  r.analytic = info_nce_grad_q(query, keys, positive_index, temperature);
  std::vector<double> q(query.begin(), query.end());
  r.numeric.resize(q.size());
  for (std::size_t d = 0; d < q.size(); ++d) {
    const double saved = q[d];
    q[d] = saved + step;
    const double up = info_nce(q, keys, positive_index, temperature);
    q[d] = saved - step;
    const double down = info_nce(q, keys, positive_index, temperature);
    q[d] = saved;
    r.numeric[d] = (up - down) / (2.0 * step);
  }
  std::vector<double> diff(q.size());
  for (std::size_t d = 0; d < q.size(); ++d) {
    diff[d] = r.analytic[d] - r.numeric[d];
    r.max_abs_error = std::max(r.max_abs_error, std::abs(diff[d]));
  }
  const double scale = std::max(norm(r.analytic), norm(r.numeric));
  r.relative_error = scale > 0.0 ? norm(diff) / scale : 0.0;
  return r;
}

}  // namespace tadac
