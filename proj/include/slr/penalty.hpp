#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "slr/types.hpp"

namespace slr {

enum class PenaltyKind { L1, SCAD, MCP, CappedL1 };

std::string_view to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(std::string_view name);

/// Separable regularizer g(beta) = sum_i g(beta_i).
///
/// theta is the SCAD/MCP shape parameter, epsilon the capped-l1 cap. Each
/// penalty is a difference of convex functions with bounded curvature, which
/// is what the nonconvex line search relies on; the split itself is never
/// needed, only g and its proximal map.
template <typename Scalar>
struct Penalty {
  PenaltyKind kind = PenaltyKind::L1;
  Scalar lambda = Scalar(1);
  Scalar theta = Scalar(0);
  Scalar epsilon = Scalar(0);

  static Penalty l1(Scalar lambda) { return Penalty{PenaltyKind::L1, lambda, 0, 0}.validated(); }
  static Penalty scad(Scalar lambda, Scalar theta = Scalar(3.7)) {
    return Penalty{PenaltyKind::SCAD, lambda, theta, 0}.validated();
  }
  static Penalty mcp(Scalar lambda, Scalar theta = Scalar(3)) {
    return Penalty{PenaltyKind::MCP, lambda, theta, 0}.validated();
  }
  // Default cap is half of lambda.
  static Penalty capped_l1(Scalar lambda, Scalar epsilon = Scalar(-1)) {
    return Penalty{PenaltyKind::CappedL1, lambda, 0,
                   epsilon < Scalar(0) ? Scalar(0.5) * lambda : epsilon}
        .validated();
  }

  /// Same shape with a different lambda. A capped-l1 cap is kept as given.
  Penalty with_lambda(Scalar new_lambda) const {
    Penalty p = *this;
    p.lambda = new_lambda;
    return p.validated();
  }

  void validate() const {
    if (!(lambda > Scalar(0)) || !std::isfinite(static_cast<double>(lambda))) {
      throw std::invalid_argument("penalty lambda must be positive and finite");
    }
    switch (kind) {
      case PenaltyKind::SCAD:
        if (!(theta > Scalar(2))) throw std::invalid_argument("SCAD requires theta > 2");
        break;
      case PenaltyKind::MCP:
        if (!(theta > Scalar(1))) throw std::invalid_argument("MCP requires theta > 1");
        break;
      case PenaltyKind::CappedL1:
        if (!(epsilon > Scalar(0))) throw std::invalid_argument("capped-l1 requires epsilon > 0");
        break;
      case PenaltyKind::L1:
        break;
    }
  }

  Penalty validated() const {
    validate();
    return *this;
  }

  bool is_convex() const { return kind == PenaltyKind::L1; }
};

/// g at a single coordinate.
template <typename Scalar>
Scalar penalty_scalar(Scalar b, const Penalty<Scalar>& pen) {
  using std::abs;
  const Scalar a = abs(b);
  const Scalar lam = pen.lambda;
  switch (pen.kind) {
    case PenaltyKind::L1:
      return lam * a;
    case PenaltyKind::CappedL1:
      return lam * std::min(a, pen.epsilon);
    case PenaltyKind::SCAD: {
      const Scalar th = pen.theta;
      if (a <= lam) return lam * a;
      if (a <= th * lam) return (-a * a + 2 * th * lam * a - lam * lam) / (2 * (th - 1));
      return (th + 1) * lam * lam / 2;
    }
    case PenaltyKind::MCP: {
      const Scalar th = pen.theta;
      if (a <= th * lam) return lam * a - a * a / (2 * th);
      return th * lam * lam / 2;
    }
  }
  return Scalar(0);
}

template <typename Derived>
typename Derived::Scalar penalty_value(const Eigen::MatrixBase<Derived>& beta,
                                       const Penalty<typename Derived::Scalar>& pen) {
  pen.validate();
  using Scalar = typename Derived::Scalar;
  Scalar total(0);
  for (Eigen::Index i = 0; i < beta.size(); ++i) total += penalty_scalar(beta(i), pen);
  return total;
}

namespace detail {

// One branch of g on w >= 0: g(w) = c2 w^2 + c1 w + c0 for w in [lo, hi].
template <typename Scalar>
struct Piece {
  Scalar lo, hi, c2, c1;
};

template <typename Scalar>
Scalar prox_objective(Scalar w, Scalar t, const Penalty<Scalar>& pen, Scalar step_l) {
  const Scalar r = w - t;
  return step_l / 2 * r * r + penalty_scalar(w, pen);
}

}  // namespace detail

/// argmin_w (L/2)(w - t)^2 + g(w).
///
/// l1 is plain soft thresholding at lambda/L. The nonconvex penalties are
/// piecewise quadratic on |w|, so the minimizer is found by enumerating each
/// branch's stationary point (when it lies inside the branch and the branch
/// is strictly convex there), the branch endpoints, 0 and t itself, and
/// keeping the candidate with the smallest objective. Exact ties go to the
/// smaller |w|.
template <typename Scalar>
Scalar prox_scalar(Scalar t, const Penalty<Scalar>& pen, Scalar step_l) {
  using std::abs;
  const Scalar a = abs(t);
  const Scalar sign = t < Scalar(0) ? Scalar(-1) : Scalar(1);
  const Scalar lam = pen.lambda;

  if (pen.kind == PenaltyKind::L1) {
    const Scalar shrunk = a - lam / step_l;
    return shrunk > Scalar(0) ? sign * shrunk : Scalar(0);
  }

  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::array<detail::Piece<Scalar>, 3> pieces{};
  std::size_t count = 0;
  switch (pen.kind) {
    case PenaltyKind::SCAD: {
      const Scalar th = pen.theta;
      pieces[count++] = {Scalar(0), lam, Scalar(0), lam};
      pieces[count++] = {lam, th * lam, Scalar(-1) / (2 * (th - 1)), th * lam / (th - 1)};
      pieces[count++] = {th * lam, inf, Scalar(0), Scalar(0)};
      break;
    }
    case PenaltyKind::MCP: {
      const Scalar th = pen.theta;
      pieces[count++] = {Scalar(0), th * lam, Scalar(-1) / (2 * th), lam};
      pieces[count++] = {th * lam, inf, Scalar(0), Scalar(0)};
      break;
    }
    case PenaltyKind::CappedL1:
      pieces[count++] = {Scalar(0), pen.epsilon, Scalar(0), lam};
      pieces[count++] = {pen.epsilon, inf, Scalar(0), Scalar(0)};
      break;
    case PenaltyKind::L1:
      break;
  }

  Scalar best_w = Scalar(0);
  Scalar best_obj = detail::prox_objective(Scalar(0), a, pen, step_l);
  auto consider = [&](Scalar w) {
    if (!(w >= Scalar(0)) || !std::isfinite(static_cast<double>(w))) return;
    const Scalar obj = detail::prox_objective(w, a, pen, step_l);
    if (obj < best_obj || (obj == best_obj && w < best_w)) {
      best_obj = obj;
      best_w = w;
    }
  };

  consider(a);
  for (std::size_t k = 0; k < count; ++k) {
    const auto& piece = pieces[k];
    consider(piece.lo);
    consider(piece.hi);
    // d/dw: L (w - a) + 2 c2 w + c1 = 0
    const Scalar curvature = step_l + 2 * piece.c2;
    if (curvature > Scalar(0)) {
      const Scalar w = (step_l * a - piece.c1) / curvature;
      if (w >= piece.lo && w <= piece.hi) consider(w);
    }
  }
  return sign * best_w;
}

template <typename Derived>
Vector<typename Derived::Scalar> prox_vector(const Eigen::MatrixBase<Derived>& u,
                                             const Penalty<typename Derived::Scalar>& pen,
                                             typename Derived::Scalar step_l) {
  using Scalar = typename Derived::Scalar;
  if (!(step_l > Scalar(0))) throw std::invalid_argument("prox step constant must be > 0");
  return u.unaryExpr([&](Scalar t) { return prox_scalar(t, pen, step_l); });
}

/// Brute-force prox: minimizes over the grid {j * grid_step} covering
/// [-|t| - 1, |t| + 1]. Used to cross-check prox_scalar.
template <typename Scalar>
Scalar prox_oracle(Scalar t, const Penalty<Scalar>& pen, Scalar step_l, Scalar grid_step) {
  using std::abs;
  if (!(grid_step > Scalar(0))) throw std::invalid_argument("grid_step must be > 0");
  const long half = static_cast<long>(std::ceil((abs(t) + 1) / grid_step));
  Scalar best_w = Scalar(0);
  Scalar best_obj = detail::prox_objective(Scalar(0), t, pen, step_l);
  for (long j = -half; j <= half; ++j) {
    const Scalar w = Scalar(j) * grid_step;
    const Scalar obj = detail::prox_objective(w, t, pen, step_l);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
    }
  }
  return best_w;
}

}  // namespace slr
