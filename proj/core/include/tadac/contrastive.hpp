#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tadac {

/// Row-major matrix of embeddings, one row per sample.
class EmbeddingBatch {
 public:
  static constexpr std::size_t kDefaultDim = 512;

  EmbeddingBatch(std::size_t rows, std::size_t dim, std::vector<double> values);
  static EmbeddingBatch from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t rows_;
  std::size_t dim_;
  std::vector<double> values_;
};

struct LossConfig {
  double temperature = 0.1;
  double alpha = 0.7;

  /// Throws ValidationError unless temperature > 0 and alpha in [0, 1].
  void validate() const;
};

/// -log softmax(q . k_i / tau)[positive] over all keys, positive included
/// in the denominator. Evaluated with max-subtraction.
double info_nce(std::span<const double> query, const EmbeddingBatch& keys,
                std::size_t positive_index, double temperature);

/// d info_nce / d query = (sum_i p_i k_i - k_positive) / tau.
std::vector<double> info_nce_grad_q(std::span<const double> query, const EmbeddingBatch& keys,
                                    std::size_t positive_index, double temperature);

/// One training batch of N aligned pairs <left_n, right_n>; exactly one of
/// them (`positive`) is the matching pair, the other N-1 are negatives.
struct PairBatch {
  std::vector<std::size_t> left_rows;
  std::vector<std::size_t> right_rows;
  std::size_t positive = 0;
};

enum class LossDirection {
  LeftQuery,  ///< left embedding of the positive pair queries the right keys
  Symmetric,  ///< adds the right-as-query term over the left keys
};

/// Image-language loss: sum over batches of info_nce with the positive
/// image embedding as query and the batch's text embeddings as keys.
double batch_loss_l1(const EmbeddingBatch& image_embs, const EmbeddingBatch& text_embs,
                     std::span<const PairBatch> batches, double temperature,
                     LossDirection direction = LossDirection::LeftQuery);

/// Image-image loss over crop-pair embeddings; same layout rules as L1.
double batch_loss_l2(const EmbeddingBatch& crops_a, const EmbeddingBatch& crops_b,
                     std::span<const PairBatch> batches, double temperature,
                     LossDirection direction = LossDirection::LeftQuery);

/// (1 - alpha) * l1 + alpha * l2.
double joint_loss(double l1, double l2, double alpha);

/// Consecutive-row layout: batch j uses rows [j*size, (j+1)*size) on both
/// sides with the positive at `positive_offset`.
std::vector<PairBatch> consecutive_batches(std::size_t rows, std::size_t batch_size,
                                           std::size_t positive_offset = 0);

struct GradientCheckResult {
  std::vector<double> analytic;
  std::vector<double> numeric;
  /// ||analytic - numeric|| / max(||analytic||, ||numeric||), 0 when both vanish.
  double relative_error = 0.0;
  double max_abs_error = 0.0;
};

/// Compares info_nce_grad_q against central differences of info_nce.
GradientCheckResult check_info_nce_gradient(std::span<const double> query,
                                            const EmbeddingBatch& keys,
                                            std::size_t positive_index, double temperature,
                                            double step = 1e-5);

}  // namespace tadac
