#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "slr/dataset.hpp"
#include "slr/logistic.hpp"
#include "slr/penalty.hpp"

namespace slr {

enum class Variant { IstaBB, IstaReverse, FistaLipschitz, IstaVanilla, FistaVanilla };

/// Line-search acceptance test. Auto picks Convex for l1 and
/// SufficientDecrease for the nonconvex penalties.
enum class Criterion { Auto, Convex, SufficientDecrease };

enum class InitKind { Zeros, Random, Given };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
std::string_view to_string(Criterion c);
Criterion parse_criterion(std::string_view name);
std::string_view to_string(InitKind k);
InitKind parse_init_kind(std::string_view name);

inline bool is_fista(Variant v) {
  return v == Variant::FistaLipschitz || v == Variant::FistaVanilla;
}

template <typename Scalar>
struct SolverOptions {
  Variant variant = Variant::IstaBB;
  Criterion criterion = Criterion::Auto;
  Scalar eta = Scalar(2);
  // Initial L. Unset means the Lipschitz constant from power iteration.
  std::optional<Scalar> fixed_initial_L;
  int max_iters = 10000;
  // Stop when |f_{k-1} - f_k| <= tol * max(1, |f_k|).
  Scalar tol = Scalar(1e-9);
  int max_backtracks = 100;
  int max_expansions = 60;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Zeros;
  Vector<Scalar> beta0;  // read when init == Given
  double lipschitz_tol = 1e-8;
  int lipschitz_max_iters = 1000;

  void validate() const {
    if (!(eta > Scalar(1))) throw std::invalid_argument("eta must be > 1");
    if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
    if (!(tol >= Scalar(0))) throw std::invalid_argument("tol must be >= 0");
    if (max_backtracks < 1) throw std::invalid_argument("max_backtracks must be >= 1");
    if (max_expansions < 1) throw std::invalid_argument("max_expansions must be >= 1");
    if (fixed_initial_L && !(*fixed_initial_L > Scalar(0))) {
      throw std::invalid_argument("fixed initial L must be > 0");
    }
  }
};

template <typename Scalar>
struct TraceRecord {
  int k = 0;
  Scalar objective{};
  Scalar L{};
  int backtracks = 0;
  Eigen::Index nnz = 0;
  double time_s = 0.0;
  // ||beta_k - beta_{k-1}||^2, zero for the initial record.
  Scalar step_sq{};
};

template <typename Scalar>
using Trace = std::vector<TraceRecord<Scalar>>;

template <typename Scalar>
struct FitResult {
  Vector<Scalar> beta;
  bool converged = false;
  // Trace has one record per iterate, starting with beta_0 at k = 0.
  Trace<Scalar> trace;
  Scalar final_objective{};
  int iterations = 0;
  double lipschitz = 0.0;
  // The run ended because the next accepted step would have raised f.
  bool ascent_stop = false;
};

/// Thrown when no trial L satisfies the acceptance test within the budget.
class LineSearchError : public std::runtime_error {
 public:
  LineSearchError(const std::string& what, double last_L)
      : std::runtime_error(what), last_L_(last_L) {}
  double last_L() const { return last_L_; }

 private:
  double last_L_;
};

template <typename Scalar>
struct LineSearchResult {
  Scalar L{};
  Vector<Scalar> candidate;
  int backtracks = 0;
};

template <typename Scalar>
Scalar objective(const Vector<Scalar>& beta, const Dataset<Scalar>& data,
                 const Penalty<Scalar>& pen) {
  return loss_value(beta, data) + penalty_value(beta, pen);
}

/// p_L(beta): the prox of g at beta - grad l(beta) / L.
template <typename Scalar>
Vector<Scalar> prox_step(const Vector<Scalar>& beta, const Dataset<Scalar>& data,
                         const Penalty<Scalar>& pen, Scalar L) {
  return prox_vector((beta - loss_gradient(beta, data) / L).eval(), pen, L);
}

/// Quadratic upper model of f around anchor, evaluated at candidate.
template <typename Scalar>
Scalar q_upper(const Vector<Scalar>& candidate, const Vector<Scalar>& anchor,
               const Dataset<Scalar>& data, const Penalty<Scalar>& pen, Scalar L) {
  const Vector<Scalar> delta = candidate - anchor;
  return loss_value(anchor, data) + delta.dot(loss_gradient(anchor, data)) +
         L / 2 * delta.squaredNorm() + penalty_value(candidate, pen);
}

/// <delta, v> / <delta, delta>, or fallback when that is not positive and
/// finite.
template <typename Scalar>
Scalar bb_stepsize(const Vector<Scalar>& delta, const Vector<Scalar>& v, Scalar fallback) {
  if (delta.size() != v.size()) throw std::invalid_argument("bb_stepsize: size mismatch");
  const Scalar num = delta.dot(v);
  const Scalar den = delta.squaredNorm();
  const Scalar q = num / den;
  if (den > Scalar(0) && q > Scalar(0) && std::isfinite(static_cast<double>(q))) return q;
  return fallback;
}

/// t_{k+1} from t_k for the FISTA momentum sequence.
template <typename Scalar>
Scalar fista_momentum_next(Scalar t) {
  return (Scalar(1) + std::sqrt(Scalar(1) + 4 * t * t)) / 2;
}

namespace detail {

template <typename Scalar>
Criterion resolve_criterion(Criterion c, const Penalty<Scalar>& pen) {
  if (c != Criterion::Auto) return c;
  return pen.is_convex() ? Criterion::Convex : Criterion::SufficientDecrease;
}

// Everything the line searches need about the anchor point.
template <typename Scalar>
struct Anchor {
  const Vector<Scalar>& beta;
  const LossWorkspace<Scalar>& ws;
};

template <typename Scalar>
struct Trial {
  Scalar L{};
  Vector<Scalar> candidate;
  bool accepted = false;
};

// Evaluates one trial L. Both tests are arranged as a comparison of small
// differences, with a slack of a few ulps of the accumulated magnitudes:
//   convex:      l(p) - l(b) <= <p - b, grad> + L/2 |p - b|^2
//   sufficient:  l(p) - l(b) + g(p) - g(b) <= -L/2 |p - b|^2
template <typename Scalar>
Trial<Scalar> evaluate_trial(const Anchor<Scalar>& anchor, const Dataset<Scalar>& data,
                             const Penalty<Scalar>& pen, Scalar L, Criterion criterion) {
  using std::abs;
  constexpr Scalar ulp = std::numeric_limits<Scalar>::epsilon();
  Trial<Scalar> trial;
  trial.L = L;
  trial.candidate = prox_vector((anchor.beta - anchor.ws.gradient / L).eval(), pen, L);
  const Vector<Scalar> delta = trial.candidate - anchor.beta;
  const Scalar delta_sq = delta.squaredNorm();
  if (delta_sq == Scalar(0)) {
    trial.accepted = true;
    return trial;
  }
  const Vector<Scalar> dz = data.features().transpose() * delta;
  const LossChange<Scalar> change = loss_change(anchor.ws, dz, data.labels());
  const Scalar quad = L / 2 * delta_sq;

  Scalar lhs = change.value;
  Scalar rhs;
  Scalar magnitude = change.magnitude + quad;
  if (criterion == Criterion::Convex) {
    const Scalar linear = delta.dot(anchor.ws.gradient);
    rhs = linear + quad;
    magnitude += abs(linear);
  } else {
    Scalar pen_change(0);
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      const Scalar term =
          penalty_scalar(trial.candidate(i), pen) - penalty_scalar(anchor.beta(i), pen);
      pen_change += term;
      magnitude += abs(term);
    }
    lhs += pen_change;
    rhs = -quad;
  }
  const Scalar slack = Scalar(8) * ulp * magnitude;
  trial.accepted = std::isfinite(static_cast<double>(lhs)) && lhs <= rhs + slack;
  return trial;
}

template <typename Scalar>
LineSearchResult<Scalar> forward_search(const Anchor<Scalar>& anchor,
                                        const Dataset<Scalar>& data,
                                        const Penalty<Scalar>& pen, Scalar L_start,
                                        Scalar eta, int max_backtracks, Criterion criterion) {
  Scalar L = L_start;
  for (int i = 0; i <= max_backtracks; ++i) {
    Trial<Scalar> trial = evaluate_trial(anchor, data, pen, L, criterion);
    if (trial.accepted) return {trial.L, std::move(trial.candidate), i};
    if (i < max_backtracks) L *= eta;
  }
  throw LineSearchError("line search failed after " + std::to_string(max_backtracks) +
                            " backtracks (last L = " + std::to_string(static_cast<double>(L)) +
                            ")",
                        static_cast<double>(L));
}

template <typename Scalar>
LineSearchResult<Scalar> reverse_search(const Anchor<Scalar>& anchor,
                                        const Dataset<Scalar>& data,
                                        const Penalty<Scalar>& pen, Scalar L0, Scalar eta,
                                        Criterion criterion, int max_expansions,
                                        int max_backtracks) {
  Trial<Scalar> last = evaluate_trial(anchor, data, pen, L0, criterion);
  if (!last.accepted) {
    // L0 itself fails (possible under sufficient decrease): search upward.
    return forward_search(anchor, data, pen, L0 * eta, eta, max_backtracks, criterion);
  }
  for (int i = 1; i < max_expansions; ++i) {
    Trial<Scalar> trial =
        evaluate_trial(anchor, data, pen, L0 / std::pow(eta, Scalar(i)), criterion);
    if (!trial.accepted) return {last.L, std::move(last.candidate), i};
    last = std::move(trial);
  }
  return {last.L, std::move(last.candidate), max_expansions};
}

template <typename Scalar>
Vector<Scalar> initial_point(const SolverOptions<Scalar>& opts, Eigen::Index d) {
  switch (opts.init) {
    case InitKind::Zeros:
      return Vector<Scalar>::Zero(d);
    case InitKind::Random: {
      std::mt19937_64 rng(opts.seed);
      std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / static_cast<double>(d)));
      Vector<Scalar> b(d);
      for (Eigen::Index j = 0; j < d; ++j) b(j) = Scalar(normal(rng));
      return b;
    }
    case InitKind::Given:
      if (opts.beta0.size() != d) {
        throw std::invalid_argument("given beta0 has length " + std::to_string(opts.beta0.size()) +
                                    ", expected " + std::to_string(d));
      }
      return opts.beta0;
  }
  return Vector<Scalar>::Zero(d);
}

}  // namespace detail

/// Smallest i >= 0 such that L = eta^i L_start passes the convex test
/// f(p_L(anchor)) <= q_L(p_L(anchor), anchor).
template <typename Scalar>
LineSearchResult<Scalar> linesearch_convex(const Vector<Scalar>& anchor,
                                           const Dataset<Scalar>& data,
                                           const Penalty<Scalar>& pen, Scalar L_start,
                                           Scalar eta, int max_backtracks) {
  const auto ws = LossWorkspace<Scalar>::at(anchor, data);
  const detail::Anchor<Scalar> a{anchor, ws};
  return detail::forward_search(a, data, pen, L_start, eta, max_backtracks, Criterion::Convex);
}

/// Smallest i >= 0 such that L = eta^i L_start passes
/// f(p_L(anchor)) <= f(anchor) - L/2 |p_L(anchor) - anchor|^2.
template <typename Scalar>
LineSearchResult<Scalar> linesearch_sufficient_decrease(const Vector<Scalar>& anchor,
                                                        const Dataset<Scalar>& data,
                                                        const Penalty<Scalar>& pen,
                                                        Scalar L_start, Scalar eta,
                                                        int max_backtracks) {
  const auto ws = LossWorkspace<Scalar>::at(anchor, data);
  const detail::Anchor<Scalar> a{anchor, ws};
  return detail::forward_search(a, data, pen, L_start, eta, max_backtracks,
                                Criterion::SufficientDecrease);
}

/// Tries L0, L0/eta, L0/eta^2, ... and keeps the last L that passed before
/// the first failure. Falls back to a forward search when L0 itself fails;
/// stops at L0/eta^(max_expansions-1) when nothing fails.
template <typename Scalar>
LineSearchResult<Scalar> reverse_search(const Vector<Scalar>& anchor, const Dataset<Scalar>& data,
                                        const Penalty<Scalar>& pen, Scalar L0, Scalar eta,
                                        Criterion criterion, int max_expansions = 60,
                                        int max_backtracks = 100) {
  const auto ws = LossWorkspace<Scalar>::at(anchor, data);
  const detail::Anchor<Scalar> a{anchor, ws};
  return detail::reverse_search(a, data, pen, L0, eta, detail::resolve_criterion(criterion, pen),
                                max_expansions, max_backtracks);
}

/// Runs one proximal-gradient variant to convergence or max_iters.
///
/// IstaBB seeds every search after the first with the BB quotient;
/// IstaReverse reverse-searches from L0 each iteration; IstaVanilla seeds
/// with the previous L. The FISTA variants keep L nondecreasing and need an
/// l1 penalty. ISTA runs never accept an objective increase: when rounding
/// alone would produce one the run ends as converged.
template <typename Scalar>
FitResult<Scalar> fit(const Dataset<Scalar>& data, const Penalty<Scalar>& pen,
                      const SolverOptions<Scalar>& opts) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&start] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  opts.validate();
  pen.validate();
  const Criterion criterion = detail::resolve_criterion(opts.criterion, pen);
  if (is_fista(opts.variant)) {
    if (!pen.is_convex()) {
      throw std::invalid_argument("FISTA variants require the l1 penalty");
    }
    if (criterion != Criterion::Convex) {
      throw std::invalid_argument("FISTA variants require the convex line-search criterion");
    }
  }

  const LipschitzEstimate lip =
      lipschitz_constant(data, opts.lipschitz_tol, opts.lipschitz_max_iters);
  if (lip.degenerate && !opts.fixed_initial_L) {
    throw std::invalid_argument("feature matrix is zero; no Lipschitz step size exists");
  }
  const Scalar L_lip = Scalar(lip.value);
  const Scalar L_init = opts.fixed_initial_L.value_or(L_lip);
  const Scalar bb_fallback = lip.degenerate ? L_init : L_lip;

  FitResult<Scalar> result;
  result.lipschitz = lip.value;
  Vector<Scalar> beta = detail::initial_point(opts, data.n_features());
  LossWorkspace<Scalar> ws = LossWorkspace<Scalar>::at(beta, data);
  Scalar pen_value = penalty_value(beta, pen);
  Scalar f = ws.loss + pen_value;
  result.trace.push_back({0, f, L_init, 0, count_nonzeros(beta), elapsed(), Scalar(0)});

  auto stop_on_change = [&opts](Scalar before, Scalar after) {
    using std::abs;
    return abs(before - after) <= opts.tol * std::max(Scalar(1), abs(after));
  };

  if (!is_fista(opts.variant)) {
    Scalar L_prev = L_init;
    Vector<Scalar> prev_beta;
    Vector<Scalar> prev_grad;
    for (int k = 1; k <= opts.max_iters; ++k) {
      const detail::Anchor<Scalar> anchor{beta, ws};
      LineSearchResult<Scalar> step;
      switch (opts.variant) {
        case Variant::IstaBB: {
          Scalar seed = L_init;
          if (k > 1) {
            seed = bb_stepsize<Scalar>(beta - prev_beta, ws.gradient - prev_grad, bb_fallback);
            seed = std::clamp(seed, Scalar(1e-12) * bb_fallback, Scalar(1e12) * bb_fallback);
          }
          step = detail::forward_search(anchor, data, pen, seed, opts.eta, opts.max_backtracks,
                                        criterion);
          break;
        }
        case Variant::IstaReverse:
          step = detail::reverse_search(anchor, data, pen, L_init, opts.eta, criterion,
                                        opts.max_expansions, opts.max_backtracks);
          break;
        default:
          step = detail::forward_search(anchor, data, pen, L_prev, opts.eta,
                                        opts.max_backtracks, criterion);
          break;
      }

      LossWorkspace<Scalar> next_ws = LossWorkspace<Scalar>::at(step.candidate, data);
      const Scalar next_pen = penalty_value(step.candidate, pen);
      const Scalar f_next = next_ws.loss + next_pen;
      if (!(f_next <= f)) {
        result.converged = std::isfinite(static_cast<double>(f_next));
        result.ascent_stop = true;
        break;
      }

      const Scalar step_sq = (step.candidate - beta).squaredNorm();
      prev_beta = std::move(beta);
      prev_grad = std::move(ws.gradient);
      beta = std::move(step.candidate);
      ws = std::move(next_ws);
      pen_value = next_pen;
      L_prev = step.L;
      result.iterations = k;
      result.trace.push_back(
          {k, f_next, step.L, step.backtracks, count_nonzeros(beta), elapsed(), step_sq});
      const bool done = stop_on_change(f, f_next);
      f = f_next;
      if (done) {
        result.converged = true;
        break;
      }
    }
  } else {
    Scalar L = L_init;
    Scalar t = Scalar(1);
    Vector<Scalar> w = beta;
    for (int k = 1; k <= opts.max_iters; ++k) {
      const LossWorkspace<Scalar> w_ws = LossWorkspace<Scalar>::at(w, data);
      const detail::Anchor<Scalar> anchor{w, w_ws};
      LineSearchResult<Scalar> step = detail::forward_search(
          anchor, data, pen, L, opts.eta, opts.max_backtracks, Criterion::Convex);
      L = step.L;
      const Scalar f_next = objective(step.candidate, data, pen);
      if (!std::isfinite(static_cast<double>(f_next))) {
        throw std::runtime_error("FISTA produced a non-finite objective");
      }
      const Scalar t_next = fista_momentum_next(t);
      w = step.candidate + ((t - 1) / t_next) * (step.candidate - beta);
      const Scalar step_sq = (step.candidate - beta).squaredNorm();
      beta = std::move(step.candidate);
      t = t_next;
      result.iterations = k;
      result.trace.push_back(
          {k, f_next, L, step.backtracks, count_nonzeros(beta), elapsed(), step_sq});
      const bool done = stop_on_change(f, f_next);
      f = f_next;
      if (done) {
        result.converged = true;
        break;
      }
    }
  }

  result.final_objective = objective(beta, data, pen);
  result.beta = std::move(beta);
  return result;
}

}  // namespace slr
