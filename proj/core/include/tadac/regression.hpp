#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace tadac {

/// Feature rows with one MOS target per row.
struct FeatureMatrix {
  Eigen::MatrixXd features;
  Eigen::VectorXd targets;

  std::size_t samples() const noexcept { return static_cast<std::size_t>(features.rows()); }
  void validate() const;
};

/// Reads a delimited text matrix: one row per image, whitespace or comma
/// separated, MOS in the last column, '#' starts a comment.
FeatureMatrix read_feature_file(const std::filesystem::path& path);

struct RidgeModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double lambda = 0.0;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
};

/// argmin ||X w + b - y||^2 + lambda ||w||^2 via normal equations on
/// centered data; the intercept is not penalized. At lambda = 0 a
/// singular system throws ValidationError.
RidgeModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

/// 10^-3, 10^-2, ..., 10^3.
inline constexpr std::array<double, 7> kLambdaGrid{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};

/// Grid value minimizing validation mean absolute error; ties go to the
/// smaller lambda.
double select_lambda(const FeatureMatrix& train, const FeatureMatrix& validation);

double mean_absolute_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);

/// Average (1-based) ranks; tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation. nullopt when either input is constant.
/// Throws ValidationError on length mismatch or fewer than 2 samples.
std::optional<double> plcc(std::span<const double> a, std::span<const double> b);

/// Pearson correlation of average ranks.
std::optional<double> srocc(std::span<const double> a, std::span<const double> b);

struct SplitProtocol {
  double train_fraction = 0.70;
  double validation_fraction = 0.10;
  double test_fraction = 0.20;
  int repeats = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// floor for train and validation, the remainder to test.
SplitSizes split_sizes(std::size_t n, const SplitProtocol& protocol);

/// Deterministic permutation of 0..n-1 for one repeat.
std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed, int repeat);

struct RepeatResult {
  int repeat = 0;
  double lambda = 0.0;
  SplitSizes sizes;
  std::optional<double> srocc;
  std::optional<double> plcc;
};

struct EvaluationReport {
  std::vector<RepeatResult> repeats;
  /// Means over repeats with a defined correlation; nullopt if none.
  std::optional<double> mean_srocc;
  std::optional<double> mean_plcc;
  int degenerate_repeats = 0;
};

/// Split, select lambda on validation, fit on train, score on test; once
/// per repeat. Needs at least 10 samples.
EvaluationReport evaluate(const FeatureMatrix& data, const SplitProtocol& protocol);

}  // namespace tadac
