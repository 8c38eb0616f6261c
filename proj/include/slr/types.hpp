#pragma once

#include <Eigen/Dense>

namespace slr {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

// Coefficients with magnitude at or below this are counted as zero.
inline constexpr double kNonzeroThreshold = 1e-10;

template <typename Derived>
Eigen::Index count_nonzeros(const Eigen::MatrixBase<Derived>& beta,
                            double threshold = kNonzeroThreshold) {
  return (beta.array().abs() > typename Derived::Scalar(threshold)).count();
}

}  // namespace slr
