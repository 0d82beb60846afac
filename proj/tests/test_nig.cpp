#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "rfssm/errors.hpp"
#include "rfssm/nig.hpp"
#include "rfssm/rng.hpp"
#include "support/oracles.hpp"
#include "support/quadrature.hpp"
#include "support/stats.hpp"

using namespace rfssm;

namespace {
Eigen::VectorXd random_vector(int n, Rng& rng, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
  return v;
}
}  // namespace

TEST_CASE("rank-1 Cholesky update matches a dense re-factorization") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(20));
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(
        n, n, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
    Eigen::MatrixXd spd =
        a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(spd).matrixL();
    const Eigen::VectorXd w0 = random_vector(n, rng);

    Eigen::VectorXd w = w0;
    cholesky_rank1_update(L, w);
    const Eigen::MatrixXd expected =
        Eigen::LLT<Eigen::MatrixXd>(spd + w0 * w0.transpose()).matrixL();
    CHECK((L.triangularView<Eigen::Lower>().toDenseMatrix() - expected).norm() <
          1e-10 * expected.norm());
  }
}

TEST_CASE("zero regressor leaves mean and factor untouched") {
  NigState state(6, 8.5, 1.0);
  const Eigen::MatrixXd factor_before = state.precision_factor();
  state.update(Eigen::VectorXd::Zero(6), 3.0);
  CHECK(state.mean().isZero(0));
  CHECK(state.precision_factor() == factor_before);
  CHECK(state.a() == 9.5);
  CHECK(state.b() == doctest::Approx(1.0 + 9.0).epsilon(1e-15));
}

TEST_CASE("sequential updates equal the batch posterior") {
  // 50 random points, feature dimension 2J = 100; acceptance criterion
  // tolerances: mean inf-norm 1e-8, b relative 1e-6, factor Frobenius 1e-8.
  const int dim = 100;
  const int n = 50;
  const double a0 = dim + 2.0;
  const double b0 = 1.0;
  Rng rng(2024);
  Eigen::MatrixXd design(n, dim);
  Eigen::VectorXd targets(n);
  NigState state(dim, a0, b0);
  for (int i = 0; i < n; ++i) {
    design.row(i) = random_vector(dim, rng, 1.0 / std::sqrt(dim)).transpose();
    targets[i] = rng.normal();
    state.update(design.row(i).transpose(), targets[i]);
  }
  const auto batch = testing::batch_nig_posterior(
      design, targets, a0, b0, Eigen::VectorXd::Zero(dim),
      Eigen::MatrixXd::Identity(dim, dim));

  CHECK(state.a() == batch.a);
  CHECK((state.mean() - batch.mean).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(std::abs(state.b() - batch.b) <= 1e-6 * batch.b);
  CHECK((state.precision_factor().triangularView<Eigen::Lower>().toDenseMatrix() -
         batch.precision_factor)
            .norm() <= 1e-8);
}

TEST_CASE("sequential-equals-batch holds for random sequence lengths") {
  Rng rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const int dim = 4 + static_cast<int>(rng.below(12));
    const int n = 1 + static_cast<int>(rng.below(100));
    NigState state(dim, dim + 3.0, 0.5);
    Eigen::MatrixXd design(n, dim);
    Eigen::VectorXd targets(n);
    for (int i = 0; i < n; ++i) {
      design.row(i) = random_vector(dim, rng).transpose();
      targets[i] = 2.0 * rng.normal();
      state.update(design.row(i).transpose(), targets[i]);
    }
    const auto batch = testing::batch_nig_posterior(
        design, targets, dim + 3.0, 0.5, Eigen::VectorXd::Zero(dim),
        Eigen::MatrixXd::Identity(dim, dim));
    CHECK((state.mean() - batch.mean).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(std::abs(state.b() - batch.b) <= 1e-6 * batch.b);
  }
}

TEST_CASE("a increments by exactly one per update") {
  const int dim = 100;  // J = 50
  NigState state(dim, dim + 2.0, 1.0);
  Rng rng(9);
  for (int i = 0; i < 1000; ++i)
    state.update(random_vector(dim, rng, 0.1), rng.normal());
  CHECK(state.a() == 1102.0);
}

TEST_CASE("factor stays SPD over many random updates") {
  const int dim = 16;
  NigState state(dim, dim + 2.0, 1.0);
  Rng rng(31);
  for (int i = 0; i < 10000; ++i)
    state.update(random_vector(dim, rng), 3.0 * rng.normal());
  CHECK(state.precision_factor().diagonal().minCoeff() > 0.0);
  CHECK(state.b() > 0.0);
  CHECK(state.clamp_count() == 0);
}

TEST_CASE("predictive at zero regressor") {
  NigState state(8, 12.0, 2.5);
  const auto p = state.predictive(Eigen::VectorXd::Zero(8));
  CHECK(p.location == 0.0);
  CHECK(p.scale == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(p.dof == doctest::Approx(4.0));
}

TEST_CASE("predictive scale is strictly positive for random states") {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const int dim = 2 + static_cast<int>(rng.below(10));
    NigState state(dim, dim + 1.5, 0.1 + rng.uniform());
    const int updates = static_cast<int>(rng.below(20));
    for (int i = 0; i < updates; ++i)
      state.update(random_vector(dim, rng), rng.normal());
    const auto p = state.predictive(random_vector(dim, rng));
    CHECK(p.scale > 0.0);
  }
}

TEST_CASE("predictive density integrates to one") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const int dim = 3;
    NigState state(dim, dim + 2.0, 1.0);
    for (int i = 0; i < 10; ++i)  // nu = 15 by now; tails are integrable
      state.update(random_vector(dim, rng), rng.normal());
    const auto p = state.predictive(random_vector(dim, rng));
    const double spread = p.spread();
    const double mass = testing::integrate(
        [&](double y) { return std::exp(t_log_density(y, p)); },
        p.location - 50.0 * spread, p.location + 50.0 * spread);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("t log density: mode, symmetry, normalization, finiteness") {
  const StudentTParams p{7.0, 1.25, 3.0};
  const double at_mode = t_log_density(p.location, p);
  CHECK(std::exp(at_mode) > std::exp(t_log_density(p.location + 0.1, p)));
  for (double delta : {0.1, 1.0, 5.0, 25.0})
    CHECK(t_log_density(p.location + delta, p) ==
          doctest::Approx(t_log_density(p.location - delta, p)).epsilon(1e-12));

  const double spread = p.spread();
  const double mass = testing::integrate(
      [&](double y) { return std::exp(t_log_density(y, p)); },
      p.location - 60.0 * spread, p.location + 60.0 * spread);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

  for (double y : {-1e12, -3.5, 0.0, 7.0, 1e12})
    CHECK(std::isfinite(t_log_density(y, p)));

  // The cached evaluator agrees with the plain one.
  const TLogDensity fast(p);
  for (double y : {-4.0, 0.0, 0.3, 9.0})
    CHECK(fast(y) == doctest::Approx(t_log_density(y, p)).epsilon(1e-14));
}

TEST_CASE("t sampling: median, rng determinism, Gaussian limit") {
  const StudentTParams p{6.0, 2.0, 12.0};
  Rng rng(101);
  const int n = 100000;
  std::vector<double> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = t_sample(p, rng);
  // Median of t is the location; allow 3 standard errors of the median.
  const double se = 1.2533 * p.spread() * std::sqrt(p.dof / (p.dof - 2.0)) /
                    std::sqrt(static_cast<double>(n));
  CHECK(std::abs(testing::median(samples) - p.location) < 3.0 * se);

  Rng r1(5), r2(5);
  for (int i = 0; i < 16; ++i) CHECK(t_sample(p, r1) == t_sample(p, r2));

  // With huge dof the draws are indistinguishable from Gaussian.
  const StudentTParams limit{1e6, 0.0, 1e6};  // spread = 1
  Rng rng2(33);
  std::vector<double> zs(20000);
  for (auto& z : zs) z = t_sample(limit, rng2);
  CHECK(testing::ks_test_pvalue(zs, testing::std_normal_cdf) > 0.01);
}

TEST_CASE("degenerate predictive inputs raise numerical errors") {
  NigState fresh(4, 4.5, 1.0);
  CHECK_THROWS_AS(
      (void)NigState(4, 3.0, 1.0),  // a0 <= dim
      ConfigError);
  const StudentTParams bad{0.0, 0.0, 1.0};
  CHECK_THROWS_AS(bad.validate(), NumericalError);
  CHECK_NOTHROW(fresh.predictive(Eigen::VectorXd::Ones(4)));
}

TEST_CASE("a bank equals independent per-dimension states exactly") {
  const int dim = 12;
  const int outputs = 3;
  BlrBank bank(dim, outputs, dim + 2.0, 1.0);
  std::vector<NigState> singles(outputs, NigState(dim, dim + 2.0, 1.0));
  Rng rng(321);
  BankPredictive pred;
  BankScratch scratch;
  for (int step = 0; step < 40; ++step) {
    const Eigen::VectorXd phi = random_vector(dim, rng);
    Eigen::VectorXd targets = random_vector(outputs, rng, 2.0);
    bank.predictive(phi, pred, scratch);
    for (int d = 0; d < outputs; ++d) {
      const auto p = singles[d].predictive(phi);
      CHECK(pred.dim(d).dof == p.dof);
      CHECK(pred.dim(d).location == p.location);
      CHECK(pred.dim(d).scale == p.scale);
    }
    bank.update(phi, targets, scratch);
    for (int d = 0; d < outputs; ++d) singles[d].update(phi, targets[d]);
  }
  for (int d = 0; d < outputs; ++d) {
    const NigState view = bank.state(d);
    CHECK(view.a() == singles[d].a());
    CHECK(view.b() == singles[d].b());
    CHECK(view.mean() == singles[d].mean());
    CHECK(view.precision_factor() == singles[d].precision_factor());
  }
}

TEST_CASE("gaussian ablation predictive has the fixed-variance form") {
  const int dim = 6;
  BlrBank bank(dim, 2, dim + 2.0, 1.0);
  Rng rng(8);
  BankPredictive t_pred, g_pred;
  BankScratch s1, s2;
  const Eigen::VectorXd phi = random_vector(dim, rng);
  bank.predictive(phi, t_pred, s1);
  bank.gaussian_predictive(phi, 0.1, g_pred, s2);
  CHECK(g_pred.locations == t_pred.locations);
  CHECK(g_pred.scales[0] == doctest::Approx(0.1 * (1.0 + t_pred.q)));
  // Same mean, different uncertainty model.
  CHECK(normal_log_density(0.0, 0.0, 1.0) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-12));
}
