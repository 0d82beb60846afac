#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "rfssm/errors.hpp"
#include "rfssm/rng.hpp"
#include "rfssm/spectral.hpp"
#include "support/stats.hpp"

using namespace rfssm;

namespace {
KernelSpec rbf_spec(std::vector<double> ls) {
  KernelSpec spec;
  spec.lengthscales = Eigen::Map<Eigen::VectorXd>(ls.data(), ls.size());
  return spec;
}
}  // namespace

TEST_CASE("frequency sampling matches the RBF spectral density moments") {
  // Monte Carlo moment check against N(0, 1/l^2).
  const auto set = sample_frequencies(rbf_spec({1.0}), 100000, 1, 7);
  const double mean = set.frequencies.mean();
  const double var = (set.frequencies.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));

  const auto wide = sample_frequencies(rbf_spec({1e3}), 100000, 1, 7);
  const double wide_var =
      (wide.frequencies.array() - wide.frequencies.mean()).square().mean();
  CHECK(wide_var == doctest::Approx(1e-6).epsilon(0.05));
}

TEST_CASE("frequency sampling is deterministic given the seed") {
  const auto a = sample_frequencies(rbf_spec({2.0, 0.5}), 64, 2, 123);
  const auto b = sample_frequencies(rbf_spec({2.0, 0.5}), 64, 2, 123);
  CHECK(a.frequencies == b.frequencies);
  const auto c = sample_frequencies(rbf_spec({2.0, 0.5}), 64, 2, 124);
  CHECK(a.frequencies != c.frequencies);
}

TEST_CASE("invalid kernel specs are rejected") {
  CHECK_THROWS_AS(sample_frequencies(rbf_spec({-1.0}), 8, 1, 0), ConfigError);
  CHECK_THROWS_AS(sample_frequencies(rbf_spec({0.0}), 8, 1, 0), ConfigError);
  CHECK_THROWS_AS(sample_frequencies(rbf_spec({1.0}), 0, 1, 0), ConfigError);
  CHECK_THROWS_AS(sample_frequencies(rbf_spec({1.0, 1.0}), 8, 1, 0), ConfigError);
}

TEST_CASE("feature map at zero is the alternating sin/cos pattern") {
  const auto set = sample_frequencies(rbf_spec({1.0, 1.0}), 5, 2, 3);
  const Eigen::VectorXd phi = feature_map(Eigen::VectorXd::Zero(2), set);
  REQUIRE(phi.size() == 10);
  const double c = 1.0 / std::sqrt(5.0);
  for (int j = 0; j < 5; ++j) {
    CHECK(phi[2 * j] == 0.0);
    CHECK(phi[2 * j + 1] == doctest::Approx(c).epsilon(1e-15));
  }
}

TEST_CASE("feature map has unit squared norm") {
  const auto set = sample_frequencies(rbf_spec({0.7, 1.3, 2.0}), 33, 3, 11);
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(3);
    for (int k = 0; k < 3; ++k) x[k] = 3.0 * rng.normal();
    const Eigen::VectorXd phi = feature_map(x, set);
    CHECK(std::abs(phi.squaredNorm() - 1.0) <= 1e-12);
  }
  CHECK_THROWS_AS(feature_map(Eigen::VectorXd::Zero(2), set), ConfigError);
}

TEST_CASE("feature inner products approximate the RBF kernel, improving with J") {
  const auto spec = rbf_spec({1.0, 1.0});
  const auto small = sample_frequencies(spec, 50, 2, 21);
  const auto large = sample_frequencies(spec, 2000, 2, 22);

  Rng rng(17);
  std::vector<double> err_small, err_large;
  double sum_large = 0.0;
  for (int pair = 0; pair < 200; ++pair) {
    Eigen::VectorXd x(2), y(2);
    for (int k = 0; k < 2; ++k) {
      x[k] = rng.normal();
      y[k] = rng.normal();
    }
    const double exact = rbf_kernel(x, y, spec.lengthscales);
    err_small.push_back(
        std::abs(feature_map(x, small).dot(feature_map(y, small)) - exact));
    const double el =
        std::abs(feature_map(x, large).dot(feature_map(y, large)) - exact);
    err_large.push_back(el);
    sum_large += el;
  }
  CHECK(sum_large / 200.0 < 0.05);
  CHECK(testing::median(err_large) < testing::median(err_small));
  CHECK(testing::median(err_large) < 0.05);
}

TEST_CASE("dictionary members stay inside the lengthscale grid") {
  const std::vector<double> grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  const auto dict = build_dictionary(grid, 100, 4, 2, 99);
  REQUIRE(dict.size() == 100);
  for (const auto& member : dict) {
    REQUIRE(member.count() == 4);
    REQUIRE(member.input_dim() == 2);
    for (int k = 0; k < 2; ++k) {
      const double l = member.source.lengthscales[k];
      CHECK(std::find(grid.begin(), grid.end(), l) != grid.end());
    }
  }
}

TEST_CASE("dictionary: singleton and determinism") {
  const std::vector<double> grid = {0.5, 2.0};
  CHECK(build_dictionary(grid, 1, 3, 1, 5).size() == 1);
  const auto a = build_dictionary(grid, 7, 3, 2, 5);
  const auto b = build_dictionary(grid, 7, 3, 2, 5);
  for (int s = 0; s < 7; ++s) {
    CHECK(a[s].source.lengthscales == b[s].source.lengthscales);
    CHECK(a[s].frequencies == b[s].frequencies);
  }
  CHECK_THROWS_AS(build_dictionary({}, 3, 3, 1, 5), ConfigError);
}

TEST_CASE("frequency set round-trips through the flat CSV layout") {
  const auto set = sample_frequencies(rbf_spec({0.25, 4.0, 1.0}), 12, 3, 77);
  std::stringstream buffer;
  write_frequency_set(buffer, set);
  const auto restored = read_frequency_set(buffer);
  CHECK(restored.seed == set.seed);
  CHECK(restored.source.lengthscales == set.source.lengthscales);
  CHECK(restored.source.variance == set.source.variance);
  CHECK(restored.frequencies == set.frequencies);
}
