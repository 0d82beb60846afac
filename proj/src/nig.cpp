#include "rfssm/nig.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "rfssm/errors.hpp"

namespace rfssm {

namespace {
constexpr double kBFloor = 1e-12;
constexpr double kDegenerateScaleEps = 1e-10;

void solve_forward(const Eigen::MatrixXd& L, const Eigen::VectorXd& phi,
                   Eigen::VectorXd& u) {
  u = phi;
  L.triangularView<Eigen::Lower>().solveInPlace(u);
}

// v := L^{-T} v.
void solve_back_inplace(const Eigen::MatrixXd& L, Eigen::VectorXd& v) {
  L.triangularView<Eigen::Lower>().transpose().solveInPlace(v);
}
}  // namespace

void cholesky_rank1_update(Eigen::MatrixXd& L, Eigen::VectorXd& w) {
  const auto n = L.rows();
  double* __restrict wp = w.data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lkk = L(k, k);
    const double wk = wp[k];
    const double r = std::sqrt(lkk * lkk + wk * wk);
    const double c = lkk / r;
    const double s = wk / r;
    L(k, k) = r;
    double* __restrict col = L.data() + k * n;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double li = col[i];
      const double wi = wp[i];
      col[i] = c * li + s * wi;
      wp[i] = c * wi - s * li;
    }
  }
}

NigState::NigState(int dim, double a0, double b0, double prior_cov_scale) {
  if (dim < 1) throw ConfigError("NIG state dimension must be >= 1");
  if (!(a0 > dim)) throw ConfigError("NIG prior requires a0 > dim");
  if (!(b0 > 0.0)) throw ConfigError("NIG prior requires b0 > 0");
  if (!(prior_cov_scale > 0.0)) throw ConfigError("NIG prior covariance scale must be > 0");
  a_ = a0;
  b_ = b0;
  mean_ = Eigen::VectorXd::Zero(dim);
  chol_ = Eigen::MatrixXd::Identity(dim, dim) / std::sqrt(prior_cov_scale);
}

StudentTParams NigState::predictive(const Eigen::VectorXd& phi) const {
  if (phi.size() != mean_.size()) throw ConfigError("NIG predictive: phi dimension mismatch");
  const double nu = a_ - static_cast<double>(dim());
  if (!(nu > 0.0)) throw NumericalError("NIG predictive requires a > dim");
  Eigen::VectorXd u;
  solve_forward(chol_, phi, u);
  const double q = u.squaredNorm();
  if (1.0 / (1.0 + q) <= kDegenerateScaleEps)
    throw NumericalError("NIG predictive: degenerate scale (1 - phi' Sigma1 phi <= eps)");
  return {nu, mean_.dot(phi), b_ * (1.0 + q)};
}

void NigState::update(const Eigen::VectorXd& phi, double y) {
  if (phi.size() != mean_.size()) throw ConfigError("NIG update: phi dimension mismatch");
  Eigen::VectorXd u;
  solve_forward(chol_, phi, u);
  const double q = u.squaredNorm();
  Eigen::VectorXd v = u;
  solve_back_inplace(chol_, v);  // now Sigma phi
  const double r = y - mean_.dot(phi);
  const double denom = 1.0 + q;
  mean_.noalias() += v * (r / denom);
  b_ += r * r / denom;
  if (b_ < kBFloor) {
    b_ = kBFloor;
    ++clamps_;
  }
  Eigen::VectorXd w = phi;
  cholesky_rank1_update(chol_, w);
  a_ += 1.0;
  if (!std::isfinite(b_) || !std::isfinite(chol_(dim() - 1, dim() - 1)))
    throw NumericalError("NIG update produced a non-finite posterior");
}

NigState NigState::restore(double a, Eigen::VectorXd mean, Eigen::MatrixXd factor,
                           double b, std::int64_t clamps) {
  NigState s;
  s.a_ = a;
  s.b_ = b;
  s.mean_ = std::move(mean);
  s.chol_ = std::move(factor);
  s.clamps_ = clamps;
  return s;
}

BlrBank::BlrBank(int feature_dim, int output_dim, double a0, double b0,
                 double prior_cov_scale) {
  if (feature_dim < 1 || output_dim < 0) throw ConfigError("BLR bank: bad dimensions");
  if (!(a0 > feature_dim)) throw ConfigError("BLR bank: prior requires a0 > feature dim");
  if (!(b0 > 0.0)) throw ConfigError("BLR bank: prior requires b0 > 0");
  if (!(prior_cov_scale > 0.0)) throw ConfigError("BLR bank: prior covariance scale must be > 0");
  a_ = a0;
  b_ = Eigen::VectorXd::Constant(output_dim, b0);
  means_ = Eigen::MatrixXd::Zero(feature_dim, output_dim);
  chol_ = Eigen::MatrixXd::Identity(feature_dim, feature_dim) / std::sqrt(prior_cov_scale);
}

void BlrBank::predictive(const Eigen::VectorXd& phi, BankPredictive& out) const {
  BankScratch scratch;
  predictive(phi, out, scratch);
}

void BlrBank::predictive(const Eigen::VectorXd& phi, BankPredictive& out,
                         BankScratch& scratch) const {
  const double nu = a_ - static_cast<double>(feature_dim());
  if (!(nu > 0.0)) throw NumericalError("BLR bank predictive requires a > feature dim");
  solve_forward(chol_, phi, scratch.u);
  scratch.q = scratch.u.squaredNorm();
  if (1.0 / (1.0 + scratch.q) <= kDegenerateScaleEps)
    throw NumericalError("BLR bank predictive: degenerate scale");
  out.nu = nu;
  out.q = scratch.q;
  // Column-wise dots keep each dimension bit-identical to a standalone
  // NigState with the same history.
  out.locations.resize(output_dim());
  for (int d = 0; d < output_dim(); ++d) out.locations[d] = means_.col(d).dot(phi);
  out.scales = b_ * (1.0 + scratch.q);
}

void BlrBank::gaussian_predictive(const Eigen::VectorXd& phi, double fixed_var,
                                  BankPredictive& out, BankScratch& scratch) const {
  solve_forward(chol_, phi, scratch.u);
  scratch.q = scratch.u.squaredNorm();
  out.nu = 0.0;  // marks Gaussian params; scales carry variances
  out.q = scratch.q;
  out.locations.resize(output_dim());
  for (int d = 0; d < output_dim(); ++d) out.locations[d] = means_.col(d).dot(phi);
  out.scales = Eigen::VectorXd::Constant(output_dim(), fixed_var * (1.0 + scratch.q));
}

void BlrBank::update(const Eigen::VectorXd& phi, const Eigen::VectorXd& targets) {
  BankScratch scratch;
  solve_forward(chol_, phi, scratch.u);
  scratch.q = scratch.u.squaredNorm();
  update(phi, targets, scratch);
}

void BlrBank::update(const Eigen::VectorXd& phi, const Eigen::VectorXd& targets,
                     BankScratch& scratch) {
  if (targets.size() != output_dim()) throw ConfigError("BLR bank update: target count mismatch");
  if (scratch.q < 0.0) {
    solve_forward(chol_, phi, scratch.u);
    scratch.q = scratch.u.squaredNorm();
  }
  const double denom = 1.0 + scratch.q;
  scratch.v = scratch.u;
  solve_back_inplace(chol_, scratch.v);
  scratch.residuals.resize(output_dim());
  for (int d = 0; d < output_dim(); ++d) {
    const double r = targets[d] - means_.col(d).dot(phi);
    scratch.residuals[d] = r;
    means_.col(d).noalias() += scratch.v * (r / denom);
    b_[d] += r * r / denom;
    if (b_[d] < kBFloor) {
      b_[d] = kBFloor;
      ++clamps_;
    }
    if (!std::isfinite(b_[d]))
      throw NumericalError("BLR bank update produced a non-finite posterior");
  }
  scratch.w = phi;
  cholesky_rank1_update(chol_, scratch.w);
  a_ += 1.0;
  scratch.q = -1.0;
}

NigState BlrBank::state(int d) const {
  return NigState::restore(a_, means_.col(d), chol_, b_[d], clamps_);
}

double normal_log_density(double y, double mean, double variance) {
  const double r = y - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + r * r / variance);
}

}  // namespace rfssm
