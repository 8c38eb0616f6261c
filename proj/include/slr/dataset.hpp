#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slr/types.hpp"

namespace slr {

/// Raised for malformed input files and invalid dataset contents.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary classification data with samples stored as columns.
///
/// features() is d x n: column i is sample x_i, so the loss gradient reads
/// X (p - y). labels() holds n values, each exactly 0 or 1. Instances are
/// immutable once constructed.
template <typename Scalar>
class Dataset {
 public:
  Dataset(Matrix<Scalar> features, Vector<Scalar> labels)
      : features_(std::move(features)), labels_(std::move(labels)) {
    if (features_.rows() < 1 || features_.cols() < 1) {
      throw DataError("dataset needs at least one feature and one sample");
    }
    if (labels_.size() != features_.cols()) {
      throw DataError("label count " + std::to_string(labels_.size()) +
                      " does not match sample count " +
                      std::to_string(features_.cols()));
    }
    if (!features_.allFinite()) {
      throw DataError("feature matrix contains NaN or Inf");
    }
    for (Eigen::Index i = 0; i < labels_.size(); ++i) {
      if (labels_(i) != Scalar(0) && labels_(i) != Scalar(1)) {
        throw DataError("label at sample " + std::to_string(i) +
                        " is not 0 or 1");
      }
    }
  }

  const Matrix<Scalar>& features() const { return features_; }
  const Vector<Scalar>& labels() const { return labels_; }
  Eigen::Index n_samples() const { return features_.cols(); }
  Eigen::Index n_features() const { return features_.rows(); }

  /// Samples at the given column indices, in that order.
  Dataset subset(std::span<const Eigen::Index> indices) const {
    Matrix<Scalar> x(n_features(), static_cast<Eigen::Index>(indices.size()));
    Vector<Scalar> y(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Eigen::Index src = indices[static_cast<std::size_t>(j)];
      x.col(j) = features_.col(src);
      y(j) = labels_(src);
    }
    return Dataset(std::move(x), std::move(y));
  }

  /// Copy with a constant-1 feature appended as the last row. The extra
  /// coefficient is penalized like every other one.
  Dataset with_intercept() const {
    Matrix<Scalar> x(n_features() + 1, n_samples());
    x.topRows(n_features()) = features_;
    x.row(n_features()).setOnes();
    return Dataset(std::move(x), labels_);
  }

  bool has_both_classes() const {
    const Scalar total = labels_.sum();
    return total > Scalar(0) && total < Scalar(n_samples());
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.features_.rows() == b.features_.rows() &&
           a.features_.cols() == b.features_.cols() &&
           a.features_ == b.features_ && a.labels_ == b.labels_;
  }

 private:
  Matrix<Scalar> features_;
  Vector<Scalar> labels_;
};

struct SyntheticSpec {
  Eigen::Index n_samples = 200;
  Eigen::Index n_features = 50;
  Eigen::Index n_nonzero = 5;
  // Standard deviation of Gaussian noise added to each margin before the
  // Bernoulli draw. Zero draws labels from sigmoid(beta^T x) exactly.
  double noise_scale = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_samples < 1 || n_features < 1) {
      throw std::invalid_argument("synthetic spec needs n_samples, n_features >= 1");
    }
    if (n_nonzero < 0 || n_nonzero > n_features) {
      throw std::invalid_argument("synthetic spec needs 0 <= n_nonzero <= n_features");
    }
    if (!(noise_scale >= 0.0)) {
      throw std::invalid_argument("synthetic spec needs noise_scale >= 0");
    }
  }
};

template <typename Scalar>
struct SyntheticProblem {
  Dataset<Scalar> data;
  Vector<Scalar> true_coefficients;
};

/// Draws a sparse logistic model and samples from it.
///
/// Stream order from one mt19937_64 seeded with spec.seed: the n_nonzero
/// leading coefficients (sign, then magnitude in [0.5, 1.5]), then the
/// feature matrix column by column from N(0, 1), then one uniform per label
/// (preceded by a margin-noise normal when noise_scale > 0).
template <typename Scalar = double>
SyntheticProblem<Scalar> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Vector<Scalar> beta = Vector<Scalar>::Zero(spec.n_features);
  for (Eigen::Index j = 0; j < spec.n_nonzero; ++j) {
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    beta(j) = Scalar(sign * (0.5 + unit(rng)));
  }

  Matrix<Scalar> x(spec.n_features, spec.n_samples);
  for (Eigen::Index i = 0; i < spec.n_samples; ++i) {
    for (Eigen::Index j = 0; j < spec.n_features; ++j) {
      x(j, i) = Scalar(normal(rng));
    }
  }

  Vector<Scalar> y(spec.n_samples);
  for (Eigen::Index i = 0; i < spec.n_samples; ++i) {
    double margin = static_cast<double>(x.col(i).dot(beta));
    if (spec.noise_scale > 0.0) margin += spec.noise_scale * normal(rng);
    const double prob = 1.0 / (1.0 + std::exp(-margin));
    y(i) = unit(rng) < prob ? Scalar(1) : Scalar(0);
  }

  return {Dataset<Scalar>(std::move(x), std::move(y)), std::move(beta)};
}

}  // namespace slr
