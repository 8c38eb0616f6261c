#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "slr/penalty.hpp"

using namespace slr;
using P = Penalty<double>;

namespace {

std::vector<P> sample_penalties() {
  return {P::l1(0.7), P::scad(1.0, 3.7), P::scad(0.4, 2.5), P::mcp(1.0, 3.0), P::mcp(0.6, 1.5),
          P::capped_l1(1.0, 0.5), P::capped_l1(0.3, 2.0)};
}

}  // namespace

TEST_CASE("penalty parameter validation") {
  CHECK_THROWS_AS(P::l1(0.0), std::invalid_argument);
  CHECK_THROWS_AS(P::l1(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(P::scad(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(P::mcp(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(P::capped_l1(1.0, 0.0), std::invalid_argument);
  CHECK(P::capped_l1(2.0).epsilon == 1.0);
  CHECK(P::scad(1.0).theta == 3.7);
  CHECK(P::mcp(1.0).theta == 3.0);
  CHECK(parse_penalty_kind("capped_l1") == PenaltyKind::CappedL1);
  CHECK(to_string(PenaltyKind::SCAD) == "scad");
  CHECK_THROWS_AS(parse_penalty_kind("lp"), std::invalid_argument);
}

TEST_CASE("penalty_value examples") {
  CHECK(penalty_value(VectorXd((VectorXd(2) << 1, -3).finished()), P::l1(2.0)) == 8.0);
  CHECK(penalty_value(VectorXd::Constant(1, 10.0), P::scad(1.0, 3.7)) ==
        doctest::Approx(2.35).epsilon(1e-15));
  CHECK(penalty_value(VectorXd::Constant(1, 5.0), P::mcp(1.0, 3.0)) == 1.5);
  CHECK(penalty_value(VectorXd::Constant(1, -4.0), P::capped_l1(1.5, 0.5)) == 0.75);

  std::mt19937_64 rng(1);
  for (const P& pen : sample_penalties()) {
    const VectorXd b = oracle::random_vector(12, rng, 3.0);
    CHECK(penalty_value(b, pen) == doctest::Approx(oracle::naive_penalty(b, pen)).epsilon(1e-14));
    CHECK(penalty_value(VectorXd::Zero(3), pen) == 0.0);
    CHECK(penalty_value(b, pen) >= 0.0);
  }
}

TEST_CASE("penalty_value is continuous at branch boundaries") {
  const double h = 1e-13;
  for (const P& pen : {P::scad(1.0, 3.7), P::scad(0.3, 2.2), P::mcp(1.0, 3.0), P::mcp(2.0, 1.2)}) {
    std::vector<double> knots{pen.theta * pen.lambda};
    if (pen.kind == PenaltyKind::SCAD) knots.push_back(pen.lambda);
    for (double k : knots) {
      const double left = penalty_scalar(k - h, pen);
      const double right = penalty_scalar(k + h, pen);
      CHECK(std::abs(left - right) < 1e-12);
    }
  }
}

TEST_CASE("prox_scalar examples") {
  CHECK(prox_scalar(3.0, P::l1(1.0), 1.0) == 2.0);
  CHECK(prox_scalar(0.5, P::l1(1.0), 1.0) == 0.0);
  // ((theta - 1) t - theta lambda) / (theta - 2) at t = 3, theta = 3.7.
  CHECK(prox_scalar(3.0, P::scad(1.0, 3.7), 1.0) ==
        doctest::Approx(2.5882352941176470588).epsilon(1e-14));
  CHECK(prox_scalar(5.0, P::scad(1.0, 3.7), 1.0) == 5.0);
  CHECK(prox_scalar(2.0, P::mcp(1.0, 3.0), 1.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(prox_scalar(4.0, P::mcp(1.0, 3.0), 1.0) == 4.0);
  CHECK(prox_scalar(3.0, P::capped_l1(1.0, 0.5), 1.0) == 3.0);
  CHECK(prox_oracle(4.0, P::mcp(1.0, 3.0), 1.0, 1e-4) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(prox_oracle(0.0, P::l1(2.5), 1.0, 1e-4) == 0.0);
}

TEST_CASE("prox_vector examples") {
  const VectorXd u = (VectorXd(2) << 1, -1).finished();
  const VectorXd got = prox_vector(u, P::l1(1.0), 2.0);
  CHECK(got(0) == 0.5);
  CHECK(got(1) == -0.5);
  for (const P& pen : sample_penalties()) CHECK(prox_vector(VectorXd::Zero(4), pen, 1.3).isZero());
  CHECK_THROWS_AS(prox_vector(u, P::l1(1.0), 0.0), std::invalid_argument);

  std::mt19937_64 rng(2);
  const VectorXd r = oracle::random_vector(20, rng, 2.0);
  for (const P& pen : sample_penalties()) {
    const VectorXd p = prox_vector(r, pen, 1.7);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      CHECK(std::abs(p(i) - prox_oracle(r(i), pen, 1.7, 1e-4)) <= 1e-3);
    }
  }
}

TEST_CASE("prox matches unit-step closed forms") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ut(-6.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double t = ut(rng);
    CHECK(std::abs(prox_scalar(t, P::scad(1.0, 3.7), 1.0) - oracle::scad_prox_unit(t, 1.0, 3.7)) <
          1e-12);
    CHECK(std::abs(prox_scalar(t, P::mcp(0.8, 2.5), 1.0) - oracle::mcp_prox_unit(t, 0.8, 2.5)) <
          1e-12);
  }
}

TEST_CASE("prox structural properties") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ut(-8.0, 8.0);
  std::uniform_real_distribution<double> ul(0.1, 4.0);
  for (const P& pen : sample_penalties()) {
    CHECK(prox_scalar(0.0, pen, 1.0) == 0.0);
    for (int i = 0; i < 300; ++i) {
      const double t = ut(rng);
      const double L = ul(rng);
      const double w = prox_scalar(t, pen, L);
      CHECK(std::abs(w) <= std::abs(t));
      CHECK((w == 0.0 || std::signbit(w) == std::signbit(t)));
      CHECK(prox_scalar(-t, pen, L) == -w);
    }
  }
  // l1 prox is nonexpansive.
  for (int i = 0; i < 300; ++i) {
    const double a = ut(rng);
    const double b = ut(rng);
    const double L = ul(rng);
    const P pen = P::l1(ul(rng));
    CHECK(std::abs(prox_scalar(a, pen, L) - prox_scalar(b, pen, L)) <= std::abs(a - b) + 1e-15);
  }
  // Identity beyond theta * lambda at unit step.
  for (double t : {3.71, 4.0, 10.0, -5.0}) CHECK(prox_scalar(t, P::scad(1.0, 3.7), 1.0) == t);
  for (double t : {3.01, 7.0, -3.5}) CHECK(prox_scalar(t, P::mcp(1.0, 3.0), 1.0) == t);
}

TEST_CASE("prox ties go to the smaller magnitude") {
  // Capped l1, L = 1, lambda = 1, eps = 0.5: keeping t costs lambda*eps = 0.5,
  // shrinking to t - 1 costs 1/2 + lambda*eps as well once t - 1 >= eps, and
  // w = 0 costs t^2/2. At t = 1 both w = 0 and w = t cost exactly 0.5.
  CHECK(prox_scalar(1.0, P::capped_l1(1.0, 0.5), 1.0) == 0.0);
  CHECK(prox_scalar(1.0 + 1e-9, P::capped_l1(1.0, 0.5), 1.0) == 1.0 + 1e-9);
}

TEST_CASE("prox agrees with the grid oracle near region boundaries") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ul(0.2, 3.0);
  for (const P& pen : sample_penalties()) {
    const double lam = pen.lambda;
    std::vector<double> ts{lam, 2 * lam};
    if (pen.theta > 0) ts.push_back(pen.theta * lam);
    if (pen.kind == PenaltyKind::CappedL1) ts.push_back(pen.epsilon);
    for (double base : ts) {
      for (double off : {-1e-6, 0.0, 1e-6}) {
        for (double sgn : {-1.0, 1.0}) {
          const double t = sgn * (base + off);
          const double L = ul(rng);
          CHECK(std::abs(prox_scalar(t, pen, L) - prox_oracle(t, pen, L, 1e-4)) <= 1e-3);
        }
      }
    }
  }
}
