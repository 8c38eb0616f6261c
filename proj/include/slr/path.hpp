#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/solver.hpp"

namespace slr {

/// Fractions of lambda_max used for the default regularization path.
inline const std::vector<double> kDefaultPathFractions{0.01, 0.02, 0.05, 0.07, 0.1,
                                                       0.2,  0.3,  0.5,  0.7,  0.8};

/// Smallest l1 weight at which beta = 0 is optimal: ||X (1/2 - y)||_inf.
template <typename Scalar>
Scalar lambda_max(const Dataset<Scalar>& data) {
  const Vector<Scalar> grad = loss_gradient(Vector<Scalar>::Zero(data.n_features()).eval(), data);
  const Scalar value = grad.template lpNorm<Eigen::Infinity>();
  if (!(value > Scalar(0))) {
    throw std::invalid_argument("lambda_max: loss gradient vanishes at the origin");
  }
  return value;
}

template <typename Scalar>
struct PathSpec {
  std::vector<double> fractions = kDefaultPathFractions;
  bool warm_start = true;
  // lambda is replaced at every path point.
  Penalty<Scalar> pen_template = Penalty<Scalar>::l1(Scalar(1));
  // When set, a capped-l1 cap is re-derived as cap_ratio * lambda per point.
  std::optional<double> cap_ratio;
  SolverOptions<Scalar> opts;

  void validate() const {
    if (fractions.empty()) throw std::invalid_argument("path needs at least one fraction");
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
        throw std::invalid_argument("path fractions must lie in (0, 1]");
      }
      if (i > 0 && !(fractions[i] > fractions[i - 1])) {
        throw std::invalid_argument("path fractions must be strictly increasing");
      }
    }
    opts.validate();
  }
};

template <typename Scalar>
struct PathPoint {
  double fraction = 0.0;
  Scalar lambda{};
  FitResult<Scalar> fit;
  Eigen::Index nnz = 0;
};

/// Thrown by run_path; names the fraction whose solve failed.
class PathError : public std::runtime_error {
 public:
  PathError(const std::string& what, double fraction)
      : std::runtime_error(what), fraction_(fraction) {}
  double fraction() const { return fraction_; }

 private:
  double fraction_;
};

/// Solves at lambda = fraction * lambda_max for each fraction, largest lambda
/// first. With warm starts each solve begins at the previous solution.
/// Points come back in the order of spec.fractions.
template <typename Scalar>
std::vector<PathPoint<Scalar>> run_path(const Dataset<Scalar>& data, const PathSpec<Scalar>& spec,
                                        std::optional<Scalar> lambda_scale = {}) {
  spec.validate();
  const Scalar scale = lambda_scale ? *lambda_scale : lambda_max(data);
  std::vector<PathPoint<Scalar>> points(spec.fractions.size());
  SolverOptions<Scalar> opts = spec.opts;
  std::optional<Vector<Scalar>> previous;

  for (std::size_t idx = spec.fractions.size(); idx-- > 0;) {
    const double frac = spec.fractions[idx];
    PathPoint<Scalar>& point = points[idx];
    point.fraction = frac;
    point.lambda = Scalar(frac) * scale;
    if (spec.warm_start && previous) {
      opts.init = InitKind::Given;
      opts.beta0 = *previous;
    }
    try {
      Penalty<Scalar> pen = spec.pen_template;
      pen.lambda = point.lambda;
      if (spec.cap_ratio && pen.kind == PenaltyKind::CappedL1) {
        pen.epsilon = Scalar(*spec.cap_ratio) * point.lambda;
      }
      point.fit = fit(data, pen, opts);
    } catch (const std::exception& e) {
      throw PathError("path point at fraction " + std::to_string(frac) + ": " + e.what(), frac);
    }
    point.nnz = count_nonzeros(point.fit.beta);
    previous = point.fit.beta;
  }
  return points;
}

/// Seeded shuffle, then contiguous folds; the first n % k folds get the
/// extra sample.
inline std::vector<std::vector<Eigen::Index>> kfold_split(Eigen::Index n, int k,
                                                          std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
  if (k > n) throw std::invalid_argument("kfold_split: k exceeds sample count");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<Eigen::Index>> folds(static_cast<std::size_t>(k));
  const Eigen::Index base = n / k;
  const Eigen::Index extra = n % k;
  auto it = order.begin();
  for (Eigen::Index f = 0; f < k; ++f) {
    const Eigen::Index size = base + (f < extra ? 1 : 0);
    folds[static_cast<std::size_t>(f)].assign(it, it + size);
    it += size;
  }
  return folds;
}

/// 1 where x_i^T beta >= 0 (probability at least one half), else 0.
template <typename Scalar>
Vector<Scalar> predict(const Vector<Scalar>& beta, const Dataset<Scalar>& data) {
  detail::check_dimension(beta, data);
  const Vector<Scalar> z = data.features().transpose() * beta;
  return z.unaryExpr([](Scalar v) { return v >= Scalar(0) ? Scalar(1) : Scalar(0); });
}

template <typename Scalar>
double accuracy(const Vector<Scalar>& predicted, const Vector<Scalar>& labels) {
  if (predicted.size() != labels.size() || labels.size() == 0) {
    throw std::invalid_argument("accuracy: size mismatch");
  }
  return static_cast<double>((predicted.array() == labels.array()).count()) /
         static_cast<double>(labels.size());
}

struct CvCell {
  double fraction = 0.0;
  int fold = 0;
  std::optional<double> accuracy;  // empty when the fold was skipped
  Eigen::Index nnz = 0;
  int iterations = 0;
  std::string skip_reason;
};

struct CvReport {
  std::vector<double> fractions;
  std::vector<CvCell> cells;  // fraction-major, then fold
  std::vector<std::optional<double>> mean_accuracy;  // per fraction
};

/// k-fold cross-validation over a path. lambda_max is recomputed on each
/// training split. Folds whose training labels are single-class, or whose
/// solve fails, are recorded as skipped cells.
template <typename Scalar>
CvReport cross_validate(const Dataset<Scalar>& data, const PathSpec<Scalar>& spec, int k,
                        std::uint64_t seed) {
  spec.validate();
  const auto folds = kfold_split(data.n_samples(), k, seed);
  const std::size_t n_frac = spec.fractions.size();

  CvReport report;
  report.fractions = spec.fractions;
  report.cells.resize(n_frac * folds.size());
  for (std::size_t fi = 0; fi < n_frac; ++fi) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      CvCell& cell = report.cells[fi * folds.size() + f];
      cell.fraction = spec.fractions[fi];
      cell.fold = static_cast<int>(f);
    }
  }

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<Eigen::Index> train_idx;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::vector<Eigen::Index> test_idx = folds[f];
    std::sort(test_idx.begin(), test_idx.end());
    const Dataset<Scalar> train = data.subset(train_idx);
    const Dataset<Scalar> test = data.subset(test_idx);

    auto skip_all = [&](const std::string& reason) {
      for (std::size_t fi = 0; fi < n_frac; ++fi) {
        report.cells[fi * folds.size() + f].skip_reason = reason;
      }
    };
    if (!train.has_both_classes()) {
      skip_all("single-class training labels");
      continue;
    }
    std::vector<PathPoint<Scalar>> points;
    try {
      points = run_path(train, spec);
    } catch (const std::exception& e) {
      skip_all(e.what());
      continue;
    }
    for (std::size_t fi = 0; fi < n_frac; ++fi) {
      CvCell& cell = report.cells[fi * folds.size() + f];
      cell.accuracy = accuracy(predict(points[fi].fit.beta, test), test.labels());
      cell.nnz = points[fi].nnz;
      cell.iterations = points[fi].fit.iterations;
    }
  }

  report.mean_accuracy.resize(n_frac);
  for (std::size_t fi = 0; fi < n_frac; ++fi) {
    double sum = 0.0;
    int used = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const CvCell& cell = report.cells[fi * folds.size() + f];
      if (cell.accuracy) {
        sum += *cell.accuracy;
        ++used;
      }
    }
    if (used > 0) report.mean_accuracy[fi] = sum / used;
  }
  return report;
}

}  // namespace slr
