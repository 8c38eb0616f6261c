#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "slr/logistic.hpp"

using namespace slr;

namespace {

Dataset<double> single(double x, double y) {
  return Dataset<double>(MatrixXd::Constant(1, 1, x), VectorXd::Constant(1, y));
}

}  // namespace

TEST_CASE("softplus is stable at both ends") {
  CHECK(softplus(0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(softplus(1000.0) == 1000.0);
  const double tiny = softplus(-1000.0);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-300);
  CHECK(sigmoid(1000.0) == 1.0);
  CHECK(sigmoid(-1000.0) >= 0.0);
  CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("loss_value examples") {
  const auto data = oracle::random_dataset(4, 9, 3);
  CHECK(loss_value(VectorXd::Zero(4).eval(), data) ==
        doctest::Approx(9 * std::log(2.0)).epsilon(1e-14));

  // softplus(10) - 10 evaluated in extended precision.
  const double want = 4.539889921686464677e-05;
  const double got = loss_value(VectorXd::Constant(1, 10.0).eval(), single(1.0, 1.0));
  CHECK(std::abs(got - want) / want < 1e-12);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = oracle::random_dataset(5, 20, 100 + rep);
    const VectorXd beta = oracle::random_vector(5, rng);
    const double ref = oracle::naive_loss(beta, d);
    CHECK(std::abs(loss_value(beta, d) - ref) / ref < 1e-12);
  }

  CHECK_THROWS_AS(loss_value(VectorXd::Zero(3).eval(), data), std::invalid_argument);
}

TEST_CASE("loss_gradient examples") {
  const auto data = oracle::random_dataset(4, 9, 3);
  const VectorXd g0 = loss_gradient(VectorXd::Zero(4).eval(), data);
  const VectorXd want = data.features() * (VectorXd::Constant(9, 0.5) - data.labels());
  CHECK((g0 - want).cwiseAbs().maxCoeff() < 1e-14);

  const VectorXd g = loss_gradient(VectorXd::Zero(1).eval(), single(2.0, 0.0));
  CHECK(g(0) == 1.0);

  CHECK_THROWS_AS(loss_gradient(VectorXd::Zero(5).eval(), data), std::invalid_argument);
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const auto data = oracle::random_dataset(8, 40, 200 + rep);
    const VectorXd beta = oracle::random_vector(8, rng, 0.5);
    const VectorXd g = loss_gradient(beta, data);
    const VectorXd fd = oracle::fd_gradient(beta, data);
    for (Eigen::Index j = 0; j < g.size(); ++j) CHECK(oracle::rel_err(g(j), fd(j)) < 1e-6);
  }
}

TEST_CASE("workspace is consistent with the free functions") {
  std::mt19937_64 rng(9);
  const auto data = oracle::random_dataset(6, 30, 4);
  const VectorXd beta = oracle::random_vector(6, rng, 3.0);
  const auto ws = LossWorkspace<double>::at(beta, data);
  CHECK(ws.loss == doctest::Approx(loss_value(beta, data)).epsilon(1e-14));
  CHECK((ws.gradient - loss_gradient(beta, data)).norm() < 1e-12);
  CHECK(ws.probabilities.minCoeff() > 0.0);
  CHECK(ws.probabilities.maxCoeff() < 1.0);

  // loss_change against a direct difference computed in long double.
  const VectorXd other = beta + oracle::random_vector(6, rng, 1e-3);
  const VectorXd dz = data.features().transpose() * (other - beta);
  const auto change = loss_change(ws, dz, data.labels());
  const double direct = oracle::naive_loss(other, data) - oracle::naive_loss(beta, data);
  CHECK(std::abs(change.value - direct) < 1e-12 * std::max(1.0, std::abs(direct)) + 1e-13);
}

TEST_CASE("loss is convex along segments") {
  std::mt19937_64 rng(21);
  const auto data = oracle::random_dataset(5, 25, 8);
  for (int rep = 0; rep < 50; ++rep) {
    const VectorXd a = oracle::random_vector(5, rng, 2.0);
    const VectorXd b = oracle::random_vector(5, rng, 2.0);
    const double t = std::uniform_real_distribution<double>(0, 1)(rng);
    const double mid = loss_value((t * a + (1 - t) * b).eval(), data);
    CHECK(mid <= t * loss_value(a, data) + (1 - t) * loss_value(b, data) + 1e-12);
  }
}

TEST_CASE("lipschitz_constant examples") {
  const Dataset<double> eye(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  CHECK(lipschitz_constant(eye).value == doctest::Approx(0.25).epsilon(1e-12));

  MatrixXd diag = MatrixXd::Zero(2, 2);
  diag(0, 0) = 2;
  diag(1, 1) = 1;
  CHECK(lipschitz_constant(Dataset<double>(diag, VectorXd::Zero(2))).value ==
        doctest::Approx(1.0).epsilon(1e-8));

  for (int rep = 0; rep < 5; ++rep) {
    const auto data = oracle::random_dataset(5, 8, 40 + rep);
    const double want = oracle::dense_lambda_max(data.features()) / 4;
    const auto est = lipschitz_constant(data);
    CHECK(std::abs(est.value - want) / want < 1e-6);
    CHECK(est.value <= want * (1 + 1e-8) + 1e-15);
    for (std::size_t i = 1; i < est.history.size(); ++i) {
      CHECK(est.history[i] >= est.history[i - 1] * (1 - 1e-14));
    }
  }
}

TEST_CASE("lipschitz_constant restarts when the start vector is in the null space") {
  // Rows sum to zero, so X^T 1 = 0 and the all-ones start collapses.
  MatrixXd x(2, 3);
  x << 1, -1, 0, -1, 1, 0;
  const auto est = lipschitz_constant(Dataset<double>(x, VectorXd::Zero(3)));
  CHECK_FALSE(est.degenerate);
  CHECK(est.value == doctest::Approx(oracle::dense_lambda_max(x) / 4).epsilon(1e-8));

  const auto zero = lipschitz_constant(Dataset<double>(MatrixXd::Zero(2, 3), VectorXd::Zero(3)));
  CHECK(zero.degenerate);
  CHECK(zero.value == 0.0);
}

TEST_CASE("gradient is Lipschitz with the estimated constant") {
  std::mt19937_64 rng(33);
  for (int rep = 0; rep < 5; ++rep) {
    const auto data = oracle::random_dataset(6, 15, 60 + rep);
    const double L = lipschitz_constant(data).value;
    for (int p = 0; p < 20; ++p) {
      const VectorXd a = oracle::random_vector(6, rng, 2.0);
      const VectorXd b = oracle::random_vector(6, rng, 2.0);
      const double lhs = (loss_gradient(a, data) - loss_gradient(b, data)).norm();
      CHECK(lhs <= L * (a - b).norm() * (1 + 1e-12));
    }
  }
}
