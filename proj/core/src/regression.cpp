#include "tadac/regression.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "tadac/errors.hpp"
#include "tadac/rng.hpp"

namespace tadac {

namespace {

FeatureMatrix subset(const FeatureMatrix& data, std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(r);
    out.targets(static_cast<Eigen::Index>(i)) = data.targets(r);
  }
  return out;
}

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("correlation inputs differ in length: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()));
  }
  if (a.size() < 2) throw ValidationError("correlation needs at least 2 samples");
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void FeatureMatrix::validate() const {
  if (features.rows() != targets.size()) {
    throw ValidationError("feature rows and targets differ in count");
  }
  if (features.rows() == 0 || features.cols() == 0) {
    throw ValidationError("feature matrix is empty");
  }
  if (!features.allFinite() || !targets.allFinite()) {
    throw ValidationError("feature matrix contains non-finite values");
  }
}

FeatureMatrix read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature file '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": not a number: '" + tok + "'");
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": inconsistent column count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("feature file '" + path.string() + "' has no rows");
  if (rows.front().size() < 2) {
    throw ValidationError("feature file needs at least one feature column plus MOS");
  }
  FeatureMatrix m;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(rows.front().size() - 1);
  m.features.resize(n, p);
  m.targets.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) m.features(i, j) = rows[i][j];
    m.targets(i) = rows[i][p];
  }
  m.validate();
  return m;
}

Eigen::VectorXd RidgeModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.size()) throw ValidationError("feature count does not match model");
  return (x * weights).array() + intercept;
}

RidgeModel ridge_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("ridge lambda must be a nonnegative finite number");
  }
  if (x.rows() == 0 || x.cols() == 0) throw ValidationError("ridge_fit needs a nonempty matrix");
  if (x.rows() != y.size()) throw ValidationError("ridge_fit: rows and targets differ");

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd rhs = xc.transpose() * yc;

  RidgeModel model;
  model.lambda = lambda;
  if (lambda == 0.0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) {
      throw ValidationError("ridge system is singular at lambda = 0 (rank " +
                            std::to_string(lu.rank()) + " of " + std::to_string(gram.rows()) +
                            ")");
    }
    model.weights = lu.solve(rhs);
  } else {
    model.weights = gram.ldlt().solve(rhs);
  }
  model.intercept = y_mean - x_mean.dot(model.weights);
  return model;
}

double mean_absolute_error(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
  return (predicted - truth).cwiseAbs().mean();
}

double select_lambda(const FeatureMatrix& train, const FeatureMatrix& validation) {
  train.validate();
  validation.validate();
  double best_lambda = kLambdaGrid.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double lambda : kLambdaGrid) {
    const RidgeModel m = ridge_fit(train.features, train.targets, lambda);
    const double err = mean_absolute_error(m.predict(validation.features), validation.targets);
    if (err < best_err) {
      best_err = err;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> plcc(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> srocc(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  const std::vector<double> ra = average_ranks(a);
  const std::vector<double> rb = average_ranks(b);
  return plcc(ra, rb);
}

void SplitProtocol::validate() const {
  const double fr[3] = {train_fraction, validation_fraction, test_fraction};
  for (double f : fr)
    if (!(f >= 0.0 && f <= 1.0)) throw ValidationError("split fractions must lie in [0, 1]");
  if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  if (repeats < 1) throw ValidationError("repeats must be at least 1");
}

SplitSizes split_sizes(std::size_t n, const SplitProtocol& protocol) {
  // The epsilon absorbs representation error such as 0.7 * 30 = 20.999...
  auto floor_of = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  SplitSizes s;
  s.train = floor_of(protocol.train_fraction);
  s.validation = floor_of(protocol.validation_fraction);
  s.test = n - s.train - s.validation;
  return s;
}

std::vector<std::size_t> split_permutation(std::size_t n, std::uint64_t seed, int repeat) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng rng(mix64(seed) ^ mix64(static_cast<std::uint64_t>(repeat) + 1));
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

EvaluationReport evaluate(const FeatureMatrix& data, const SplitProtocol& protocol) {
  data.validate();
  protocol.validate();
  const std::size_t n = data.samples();
  if (n < 10) {
    throw ValidationError("evaluation needs at least 10 samples, got " + std::to_string(n));
  }
  const SplitSizes sizes = split_sizes(n, protocol);
  if (sizes.train < 2 || sizes.validation < 1 || sizes.test < 2) {
    throw ValidationError("split leaves too few samples in a partition");
  }

  EvaluationReport report;
  double sum_s = 0.0, sum_p = 0.0;
  int count_s = 0, count_p = 0;
  for (int r = 0; r < protocol.repeats; ++r) {
    const std::vector<std::size_t> perm = split_permutation(n, protocol.seed, r);
    const std::span<const std::size_t> all(perm);
    const FeatureMatrix train = subset(data, all.subspan(0, sizes.train));
    const FeatureMatrix val = subset(data, all.subspan(sizes.train, sizes.validation));
    const FeatureMatrix test = subset(data, all.subspan(sizes.train + sizes.validation));

    RepeatResult row;
    row.repeat = r;
    row.sizes = sizes;
    row.lambda = select_lambda(train, val);
    const RidgeModel model = ridge_fit(train.features, train.targets, row.lambda);
    const std::vector<double> pred = to_vector(model.predict(test.features));
    const std::vector<double> truth = to_vector(test.targets);
    row.srocc = srocc(pred, truth);
    row.plcc = plcc(pred, truth);
    if (row.srocc) {
      sum_s += *row.srocc;
      ++count_s;
    }
    if (row.plcc) {
      sum_p += *row.plcc;
      ++count_p;
    }
    if (!row.srocc || !row.plcc) ++report.degenerate_repeats;
    report.repeats.push_back(row);
  }
  if (count_s > 0) report.mean_srocc = sum_s / count_s;
  if (count_p > 0) report.mean_plcc = sum_p / count_p;
  return report;
}

}  // namespace tadac
