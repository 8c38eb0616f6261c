#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/dataset.hpp"

namespace slr {

/// ln(1 + e^z) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

namespace detail {

template <typename Scalar>
void check_dimension(const Vector<Scalar>& beta, const Dataset<Scalar>& data) {
  if (beta.size() != data.n_features()) {
    throw std::invalid_argument("coefficient length " + std::to_string(beta.size()) +
                                " does not match feature count " +
                                std::to_string(data.n_features()));
  }
}

// Labels are exactly 0 or 1, and softplus(z) - z = softplus(-z), which avoids
// cancelling two large terms when y = 1 and z >> 0.
template <typename Scalar>
Scalar loss_from_margins(const Vector<Scalar>& z, const Vector<Scalar>& y) {
  Scalar total(0);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += y(i) == Scalar(1) ? softplus(-z(i)) : softplus(z(i));
  }
  return total;
}

template <typename Scalar>
Vector<Scalar> sigmoid_of(const Vector<Scalar>& z) {
  return z.unaryExpr([](Scalar v) { return sigmoid(v); });
}

// X (p - y). Shared by every gradient path so that lambda_max and the solver
// see bit-identical gradients at the origin.
template <typename Scalar>
Vector<Scalar> gradient_from_probabilities(const Dataset<Scalar>& data,
                                           const Vector<Scalar>& p) {
  return data.features() * (p - data.labels());
}

}  // namespace detail

/// sum_i softplus(x_i^T beta) - y_i x_i^T beta.
template <typename Scalar>
Scalar loss_value(const Vector<Scalar>& beta, const Dataset<Scalar>& data) {
  detail::check_dimension(beta, data);
  const Vector<Scalar> z = data.features().transpose() * beta;
  return detail::loss_from_margins(z, data.labels());
}

template <typename Scalar>
Vector<Scalar> loss_gradient(const Vector<Scalar>& beta, const Dataset<Scalar>& data) {
  detail::check_dimension(beta, data);
  const Vector<Scalar> z = data.features().transpose() * beta;
  return detail::gradient_from_probabilities(data, detail::sigmoid_of(z));
}

/// Margins, probabilities, loss and gradient at one point. The solver keeps
/// one of these for the current anchor so trial steps only need X^T delta.
template <typename Scalar>
struct LossWorkspace {
  Vector<Scalar> margins;        // z_i = x_i^T beta
  Vector<Scalar> probabilities;  // p_i = sigmoid(z_i), strictly inside (0, 1)
  Scalar loss{};
  Vector<Scalar> gradient;

  static LossWorkspace at(const Vector<Scalar>& beta, const Dataset<Scalar>& data) {
    detail::check_dimension(beta, data);
    LossWorkspace ws;
    ws.margins = data.features().transpose() * beta;
    ws.probabilities = detail::sigmoid_of(ws.margins);
    ws.loss = detail::loss_from_margins(ws.margins, data.labels());
    ws.gradient = detail::gradient_from_probabilities(data, ws.probabilities);
    return ws;
  }
};

template <typename Scalar>
struct LossChange {
  Scalar value{};
  // Sum of magnitudes of the accumulated terms; bounds the rounding error.
  Scalar magnitude{};
};

/// l(beta + delta) - l(beta), given the anchor workspace and dz = X^T delta.
///
/// Uses softplus(z + dz) - softplus(z) = log1p(expm1(dz) * sigmoid(z)) so the
/// difference keeps relative accuracy when delta is small, where subtracting
/// two loss values would lose it.
template <typename Scalar>
LossChange<Scalar> loss_change(const LossWorkspace<Scalar>& anchor,
                               const Vector<Scalar>& dz, const Vector<Scalar>& labels) {
  using std::abs;
  LossChange<Scalar> change;
  for (Eigen::Index i = 0; i < dz.size(); ++i) {
    const Scalar z = anchor.margins(i);
    Scalar term;
    if (abs(dz(i)) < Scalar(30)) {
      term = std::log1p(std::expm1(dz(i)) * anchor.probabilities(i));
    } else {
      term = softplus(z + dz(i)) - softplus(z);
    }
    term -= labels(i) * dz(i);
    change.value += term;
    change.magnitude += abs(term);
  }
  return change;
}

struct LipschitzEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  // X is zero (or numerically so): no finite step size can be derived.
  bool degenerate = false;
  // Rayleigh quotient of X X^T after each iteration.
  std::vector<double> history;
};

/// Lipschitz constant of the loss gradient, one quarter of lambda_max(X X^T).
///
/// Power iteration applied as X (X^T v), starting from the normalized
/// all-ones vector. Stops when successive Rayleigh quotients differ by less
/// than tol relative. If the iterate collapses to zero the run restarts once
/// from a seeded Gaussian vector before reporting a degenerate matrix.
template <typename Scalar>
LipschitzEstimate lipschitz_constant(const Dataset<Scalar>& data, double tol = 1e-8,
                                     int max_iters = 1000) {
  if (!(tol > 0.0)) throw std::invalid_argument("lipschitz_constant: tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("lipschitz_constant: max_iters must be >= 1");

  const Matrix<Scalar>& x = data.features();
  const Eigen::Index d = x.rows();
  LipschitzEstimate est;
  Vector<Scalar> v = Vector<Scalar>::Ones(d) / std::sqrt(Scalar(d));
  bool restarted = false;
  double previous = 0.0;

  for (int it = 1; it <= max_iters; ++it) {
    est.iterations = it;
    const Vector<Scalar> u = x.transpose() * v;
    Vector<Scalar> w = x * u;
    const Scalar norm = w.norm();
    if (!(norm > Scalar(0))) {
      if (restarted) {
        est.degenerate = true;
        est.value = 0.0;
        return est;
      }
      restarted = true;
      std::mt19937_64 rng(0x5eed);
      std::normal_distribution<double> normal;
      for (Eigen::Index j = 0; j < d; ++j) v(j) = Scalar(normal(rng));
      v.normalize();
      continue;
    }
    const double rayleigh = static_cast<double>(u.squaredNorm());
    est.history.push_back(rayleigh);
    v = w / norm;
    if (est.history.size() > 1 && std::abs(rayleigh - previous) < tol * rayleigh) {
      est.converged = true;
      previous = rayleigh;
      break;
    }
    previous = rayleigh;
  }
  est.value = previous / 4.0;
  return est;
}

}  // namespace slr
