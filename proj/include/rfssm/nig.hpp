#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "rfssm/studentt.hpp"

namespace rfssm {

// In-place rank-1 Cholesky update: L := chol(L L' + w w'). L is lower
// triangular with positive diagonal; w is destroyed. Adding a positive
// rank-1 term keeps the matrix SPD, so the update cannot fail for finite
// inputs. O(n^2).
void cholesky_rank1_update(Eigen::MatrixXd& L, Eigen::VectorXd& w);

// Normal-inverse-Gamma posterior for one scalar-output linear regression:
// (theta, sigma^2) with theta | sigma^2 ~ N(mean, sigma^2 Sigma) and
// sigma^2 ~ IG(a/2-ish shape, b/2 scale) in the (a, b) parameterization of
// the sequential update a' = a + 1. The covariance is held as the lower
// Cholesky factor L of the PRECISION Sigma^{-1} = L L'; conjugate updates are
// rank-1 factor updates and never form an inverse.
class NigState {
 public:
  NigState() = default;
  // Prior: mean 0, Sigma = prior_cov_scale * I, shape a0, scale b0.
  NigState(int dim, double a0, double b0, double prior_cov_scale = 1.0);

  int dim() const { return static_cast<int>(mean_.size()); }
  double a() const { return a_; }
  double b() const { return b_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& precision_factor() const { return chol_; }
  std::int64_t clamp_count() const { return clamps_; }

  // Predictive distribution of y at regressor phi: Student's t with
  // nu = a - dim, location phi' mean, and scale b (1 + phi' Sigma phi);
  // the (1 + q) form equals b / (1 - phi' Sigma_1 phi) with
  // Sigma_1 = (Sigma^{-1} + phi phi')^{-1} by Sherman-Morrison.
  StudentTParams predictive(const Eigen::VectorXd& phi) const;

  // Conjugate update with observation (phi, y): a' = a + 1, precision gains
  // phi phi', mean moves by Sigma phi (y - phi' mean)/(1 + q), and
  // b' = b + (y - phi' mean)^2 / (1 + q), which is the stable algebraic
  // equivalent of b + y^2 + mean' P mean - mean1' P1 mean1.
  void update(const Eigen::VectorXd& phi, double y);

  // Restore from serialized parts.
  static NigState restore(double a, Eigen::VectorXd mean, Eigen::MatrixXd factor,
                          double b, std::int64_t clamps);

 private:
  double a_ = 0.0;
  double b_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_;  // lower Cholesky of the precision
  std::int64_t clamps_ = 0;
};

// Joint predictive/update results for a bank (below); q and nu are shared
// across output dims, locations and scales are per dim.
struct BankPredictive {
  double nu = 0.0;
  double q = 0.0;
  Eigen::VectorXd locations;
  Eigen::VectorXd scales;

  StudentTParams dim(int d) const { return {nu, locations[d], scales[d]}; }
};

// Reusable solve buffers; lets a caller that performs predictive-then-update
// with the same phi skip the second forward solve.
struct BankScratch {
  Eigen::VectorXd u;  // L^{-1} phi
  double q = -1.0;    // u'u, < 0 when stale
  Eigen::VectorXd v;  // back-solve workspace
  Eigen::VectorXd w;  // cholupdate workspace
  Eigen::VectorXd residuals;
};

// A bank of `output_dim` NIG regressions that share one regressor stream and
// therefore one precision factor: the precision recursion
// Lambda' = Lambda + phi phi' does not involve the targets, so all output
// dimensions of a particle stream carry identical factors. Only the means and
// b differ per dimension. Behaves exactly like output_dim independent
// NigStates (asserted by tests) at a fraction of the memory and flops.
class BlrBank {
 public:
  BlrBank() = default;
  BlrBank(int feature_dim, int output_dim, double a0, double b0,
          double prior_cov_scale = 1.0);

  int feature_dim() const { return static_cast<int>(means_.rows()); }
  int output_dim() const { return static_cast<int>(means_.cols()); }
  double a() const { return a_; }
  double nu() const { return a_ - static_cast<double>(feature_dim()); }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::MatrixXd& means() const { return means_; }
  const Eigen::MatrixXd& precision_factor() const { return chol_; }
  std::int64_t clamp_count() const { return clamps_; }

  void predictive(const Eigen::VectorXd& phi, BankPredictive& out) const;
  void predictive(const Eigen::VectorXd& phi, BankPredictive& out,
                  BankScratch& scratch) const;

  // Gaussian ablation: same locations, variance fixed_var * (1 + q) per dim,
  // ignoring the NIG variance posterior.
  void gaussian_predictive(const Eigen::VectorXd& phi, double fixed_var,
                           BankPredictive& out, BankScratch& scratch) const;

  void update(const Eigen::VectorXd& phi, const Eigen::VectorXd& targets);
  // Reuses scratch.u/q from a preceding predictive() with the same phi.
  void update(const Eigen::VectorXd& phi, const Eigen::VectorXd& targets,
              BankScratch& scratch);

  // Materialize the spec-level view of one output dimension.
  NigState state(int output_dim) const;

  // Serialization hooks (see checkpoint.cpp).
  double& raw_a() { return a_; }
  Eigen::VectorXd& raw_b() { return b_; }
  Eigen::MatrixXd& raw_means() { return means_; }
  Eigen::MatrixXd& raw_factor() { return chol_; }
  std::int64_t& raw_clamps() { return clamps_; }

 private:
  double a_ = 0.0;
  Eigen::VectorXd b_;
  Eigen::MatrixXd means_;  // feature_dim x output_dim
  Eigen::MatrixXd chol_;   // shared lower Cholesky of the precision
  std::int64_t clamps_ = 0;
};

double normal_log_density(double y, double mean, double variance);

}  // namespace rfssm
