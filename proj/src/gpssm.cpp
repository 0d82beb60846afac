#include "rfssm/gpssm.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <utility>

#include "rfssm/detail/binary_io.hpp"
#include "rfssm/errors.hpp"
#include "rfssm/parallel.hpp"
#include "rfssm/particles.hpp"

namespace rfssm {

namespace {

KernelSpec default_kernel(const KernelSpec& given, int dim) {
  KernelSpec spec = given;
  if (spec.lengthscales.size() == 0) spec.lengthscales = Eigen::VectorXd::Ones(dim);
  return spec;
}

double log_sum_exp_minus_log_m(const Eigen::VectorXd& values) {
  const double max = values.maxCoeff();
  if (!std::isfinite(max)) return -std::numeric_limits<double>::infinity();
  return max + std::log((values.array() - max).exp().sum()) -
         std::log(static_cast<double>(values.size()));
}

std::uint64_t bank_bytes(int feature_dim, int output_dim) {
  const std::uint64_t n = feature_dim;
  return 8ull * (n * n + n * static_cast<std::uint64_t>(output_dim) + 8);
}

}  // namespace

void GpssmConfig::validate() const {
  if (state_dim < 1) throw ConfigError("state_dim must be >= 1");
  if (obs_dim < 0) throw ConfigError("obs_dim must be >= 0");
  if (num_features_x < 1 || num_features_y < 1)
    throw ConfigError("feature counts must be >= 1");
  if (num_particles < 1) throw ConfigError("num_particles must be >= 1");
  if (!(ess_fraction > 0.0 && ess_fraction <= 1.0))
    throw ConfigError("ess_fraction must lie in (0, 1]");
  if (likelihood == LikelihoodMode::kGaussianFixed && !(fixed_noise_var > 0.0))
    throw ConfigError("fixed_noise_var must be positive");
  const double a0x = prior_x.resolve_a0(2 * num_features_x);
  const double a0y = prior_y.resolve_a0(2 * num_features_y);
  if (!(a0x > 2.0 * num_features_x) || !(prior_x.b0 > 0.0))
    throw ConfigError("transition prior requires a0 > 2*J_x and b0 > 0");
  if (!(a0y > 2.0 * num_features_y) || !(prior_y.b0 > 0.0))
    throw ConfigError("observation prior requires a0 > 2*J_y and b0 > 0");

  const int banks = shared_params ? 1 : num_particles;
  const std::uint64_t estimate =
      static_cast<std::uint64_t>(banks) *
      (bank_bytes(2 * num_features_x, state_dim) +
       bank_bytes(2 * num_features_y, obs_dim));
  if (estimate > memory_limit_bytes)
    throw ConfigError("configuration exceeds the memory limit: needs about " +
                      std::to_string(estimate >> 20) + " MiB");
}

GpssmConfig GpssmConfig::resolved() const {
  GpssmConfig out = *this;
  out.kernel_x = default_kernel(kernel_x, state_dim);
  out.kernel_y = default_kernel(kernel_y, state_dim);
  out.validate();
  out.kernel_x.validate();
  out.kernel_y.validate();
  if (out.kernel_x.lengthscales.size() != state_dim ||
      out.kernel_y.lengthscales.size() != state_dim)
    throw ConfigError("kernel lengthscale count must equal state_dim");
  return out;
}

GpssmMember::GpssmMember(const GpssmConfig& config, std::uint64_t seed)
    : config_(config.resolved()), seed_(seed) {
  const int m = config_.num_particles;
  omega_x_ = sample_frequencies(config_.kernel_x, config_.num_features_x,
                                config_.state_dim,
                                derive_seed(seed, {kTagOmegaLayer, 1}));
  omega_y_ = sample_frequencies(config_.kernel_y, config_.num_features_y,
                                config_.state_dim, derive_seed(seed, {kTagOmegaObs}));

  const int banks = config_.shared_params ? 1 : m;
  trans_banks_.assign(
      banks, BlrBank(2 * config_.num_features_x, config_.state_dim,
                     config_.prior_x.resolve_a0(2 * config_.num_features_x),
                     config_.prior_x.b0, config_.kernel_x.variance));
  obs_banks_.assign(
      banks, BlrBank(2 * config_.num_features_y, config_.obs_dim,
                     config_.prior_y.resolve_a0(2 * config_.num_features_y),
                     config_.prior_y.b0, config_.kernel_y.variance));

  stream_rngs_.reserve(m);
  for (int i = 0; i < m; ++i)
    stream_rngs_.emplace_back(derive_seed(seed, {kTagStream, static_cast<std::uint64_t>(i)}));
  member_rng_ = Rng(derive_seed(seed, {kTagResample}));

  init_particles();
}

GpssmMember::GpssmMember(const GpssmConfig& config, std::uint64_t seed,
                         const std::vector<std::uint64_t>& stream_seeds)
    : GpssmMember(config, seed) {
  if (static_cast<int>(stream_seeds.size()) != config_.num_particles)
    throw ConfigError("stream seed count must equal num_particles");
  for (int i = 0; i < config_.num_particles; ++i) stream_rngs_[i] = Rng(stream_seeds[i]);
  init_particles();
}

void GpssmMember::init_particles() {
  const int m = config_.num_particles;
  const int d = config_.state_dim;
  particles_.resize(m, d);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < d; ++k) particles_(i, k) = stream_rngs_[i].normal();
  prev_particles_ = particles_;
  weights_ = Eigen::VectorXd::Constant(m, 1.0 / m);
  xhat_prev_ = Eigen::VectorXd::Zero(d);
  last_ancestors_.resize(m);
  for (int i = 0; i < m; ++i) last_ancestors_[i] = i;
  t_ = 1;

  phi_x_.resize(2 * config_.num_features_x, m);
  phi_y_.resize(2 * config_.num_features_y, m);
  trans_scratch_.assign(m, {});
  obs_scratch_.assign(m, {});
  obs_pred_.assign(m, {});
  obs_logdens_.resize(m, config_.obs_dim);
}

const BlrBank& GpssmMember::transition_bank(int stream) const {
  return trans_banks_[config_.shared_params ? 0 : stream];
}

const BlrBank& GpssmMember::observation_bank(int stream) const {
  return obs_banks_[config_.shared_params ? 0 : stream];
}

std::int64_t GpssmMember::b_clamp_events() const {
  std::int64_t total = 0;
  for (const auto& bank : trans_banks_) total += bank.clamp_count();
  for (const auto& bank : obs_banks_) total += bank.clamp_count();
  return total;
}

void GpssmMember::propagate(Executor* exec) {
  prev_particles_.swap(particles_);
  const bool gaussian = config_.likelihood == LikelihoodMode::kGaussianFixed;
  parallel_for(exec, config_.num_particles, [&](int m) {
    const BlrBank& bank = trans_banks_[config_.shared_params ? 0 : m];
    const Eigen::VectorXd x_prev = prev_particles_.row(m).transpose();
    feature_map_into(x_prev, omega_x_, phi_x_.col(m));
    BankPredictive pred;
    if (gaussian) {
      bank.gaussian_predictive(phi_x_.col(m), config_.fixed_noise_var, pred,
                               trans_scratch_[m]);
      for (int d = 0; d < config_.state_dim; ++d)
        particles_(m, d) =
            pred.locations[d] + std::sqrt(pred.scales[d]) * stream_rngs_[m].normal();
    } else {
      bank.predictive(phi_x_.col(m), pred, trans_scratch_[m]);
      for (int d = 0; d < config_.state_dim; ++d)
        particles_(m, d) = t_sample(pred.dim(d), stream_rngs_[m]);
    }
  }, 16);
  trans_cache_valid_ = true;
  obs_cache_valid_ = false;
  ++t_;
}

void GpssmMember::ensure_transition_caches() const {
  if (trans_cache_valid_) return;
  for (int m = 0; m < config_.num_particles; ++m) {
    const Eigen::VectorXd x_prev = prev_particles_.row(m).transpose();
    feature_map_into(x_prev, omega_x_, phi_x_.col(m));
    trans_scratch_[m].q = -1.0;  // force fresh solves
  }
  trans_cache_valid_ = true;
}

void GpssmMember::update_transition_posteriors(Executor* exec) {
  if (config_.shared_params)
    throw ConfigError("shared_params members update parameters inside step()");
  ensure_transition_caches();
  parallel_for(exec, config_.num_particles, [&](int m) {
    trans_banks_[m].update(phi_x_.col(m), particles_.row(m).transpose(),
                           trans_scratch_[m]);
  }, 16);
  trans_cache_valid_ = false;
}

void GpssmMember::ensure_observation_caches(Executor* exec) const {
  if (obs_cache_valid_) return;
  const bool gaussian = config_.likelihood == LikelihoodMode::kGaussianFixed;
  parallel_for(exec, config_.num_particles, [&](int m) {
    const BlrBank& bank = obs_banks_[config_.shared_params ? 0 : m];
    const Eigen::VectorXd x_now = particles_.row(m).transpose();
    feature_map_into(x_now, omega_y_, phi_y_.col(m));
    if (gaussian) {
      bank.gaussian_predictive(phi_y_.col(m), config_.fixed_noise_var, obs_pred_[m],
                               obs_scratch_[m]);
    } else {
      bank.predictive(phi_y_.col(m), obs_pred_[m], obs_scratch_[m]);
    }
  }, 16);
  obs_cache_valid_ = true;
}

Eigen::VectorXd GpssmMember::weigh(const Eigen::VectorXd& y, Executor* exec) const {
  if (config_.obs_dim == 0) return Eigen::VectorXd::Zero(config_.num_particles);
  if (y.size() != config_.obs_dim) throw ConfigError("weigh: observation dimension mismatch");
  ensure_observation_caches(exec);
  const bool gaussian = config_.likelihood == LikelihoodMode::kGaussianFixed;
  Eigen::VectorXd logw(config_.num_particles);
  for (int m = 0; m < config_.num_particles; ++m) {
    double acc = 0.0;
    const BankPredictive& pred = obs_pred_[m];
    for (int d = 0; d < config_.obs_dim; ++d) {
      const double ld = gaussian
                            ? normal_log_density(y[d], pred.locations[d], pred.scales[d])
                            : t_log_density(y[d], pred.dim(d));
      obs_logdens_(m, d) = ld;
      acc += ld;
    }
    logw[m] = acc;
  }
  return logw;
}

void GpssmMember::update_observation_posteriors(const Eigen::VectorXd& y,
                                                Executor* exec) {
  if (config_.shared_params)
    throw ConfigError("shared_params members update parameters inside step()");
  if (config_.obs_dim == 0) return;
  if (y.size() != config_.obs_dim)
    throw ConfigError("observation update: dimension mismatch");
  ensure_observation_caches(exec);
  parallel_for(exec, config_.num_particles, [&](int m) {
    obs_banks_[m].update(phi_y_.col(m), y, obs_scratch_[m]);
  }, 16);
  obs_cache_valid_ = false;
}

StepResult GpssmMember::step(const Eigen::VectorXd& y, Executor* exec) {
  if (config_.shared_params) return shared_step(y, exec);
  if (config_.obs_dim > 0 && y.size() != config_.obs_dim)
    throw ConfigError("step: observation dimension mismatch");

  const bool gaussian = config_.likelihood == LikelihoodMode::kGaussianFixed;
  prev_particles_.swap(particles_);

  // Phase A: per stream, propagate and update the transition posterior with
  // the same regressor phi(x_{t-1}); one pass over each factor.
  parallel_for(exec, config_.num_particles, [&](int m) {
    BlrBank& bank = trans_banks_[m];
    const Eigen::VectorXd x_prev = prev_particles_.row(m).transpose();
    feature_map_into(x_prev, omega_x_, phi_x_.col(m));
    BankPredictive pred;
    if (gaussian) {
      bank.gaussian_predictive(phi_x_.col(m), config_.fixed_noise_var, pred,
                               trans_scratch_[m]);
      for (int d = 0; d < config_.state_dim; ++d)
        particles_(m, d) =
            pred.locations[d] + std::sqrt(pred.scales[d]) * stream_rngs_[m].normal();
    } else {
      bank.predictive(phi_x_.col(m), pred, trans_scratch_[m]);
      for (int d = 0; d < config_.state_dim; ++d)
        particles_(m, d) = t_sample(pred.dim(d), stream_rngs_[m]);
    }
    bank.update(phi_x_.col(m), particles_.row(m).transpose(), trans_scratch_[m]);
  }, 16);
  trans_cache_valid_ = false;
  ++t_;

  // Phase B: per stream, the pre-update predictive of y (weight snapshot),
  // then the conjugate observation update.
  if (config_.obs_dim > 0) {
    parallel_for(exec, config_.num_particles, [&](int m) {
      BlrBank& bank = obs_banks_[m];
      const Eigen::VectorXd x_now = particles_.row(m).transpose();
      feature_map_into(x_now, omega_y_, phi_y_.col(m));
      if (gaussian) {
        bank.gaussian_predictive(phi_y_.col(m), config_.fixed_noise_var, obs_pred_[m],
                                 obs_scratch_[m]);
        for (int d = 0; d < config_.obs_dim; ++d)
          obs_logdens_(m, d) =
              normal_log_density(y[d], obs_pred_[m].locations[d], obs_pred_[m].scales[d]);
      } else {
        bank.predictive(phi_y_.col(m), obs_pred_[m], obs_scratch_[m]);
        for (int d = 0; d < config_.obs_dim; ++d)
          obs_logdens_(m, d) = t_log_density(y[d], obs_pred_[m].dim(d));
      }
      bank.update(phi_y_.col(m), y, obs_scratch_[m]);
    }, 16);
    obs_cache_valid_ = false;
  }

  return finish_step(y, exec);
}

StepResult GpssmMember::finish_step(const Eigen::VectorXd& y, Executor*) {
  const int m = config_.num_particles;
  StepResult result;

  const Eigen::VectorXd prior_weights = weights_;
  Eigen::VectorXd combined(m);
  if (config_.obs_dim > 0) {
    const Eigen::VectorXd logdens_rows = obs_logdens_.rowwise().sum();
    combined = prior_weights.array().log() + logdens_rows.array();
    const auto normalized = normalize_log_weights(combined);
    weights_ = normalized.weights;
    result.log_evidence_increment =
        normalized.log_evidence_increment + std::log(static_cast<double>(m));

    result.predictive_mean.resize(config_.obs_dim);
    result.log_predictive.resize(config_.obs_dim);
    for (int d = 0; d < config_.obs_dim; ++d) {
      double mean = 0.0;
      for (int i = 0; i < m; ++i) mean += prior_weights[i] * obs_pred_[i].locations[d];
      result.predictive_mean[d] = mean;
      result.log_predictive[d] = log_sum_exp_minus_log_m(
          (prior_weights.array().log() + obs_logdens_.col(d).array()).matrix()) +
          std::log(static_cast<double>(m));
    }
  } else {
    (void)y;
    result.log_evidence_increment = 0.0;
  }

  result.state_estimate = mmse_estimate(particles_, weights_);
  result.ess = effective_sample_size(weights_);
  result.posterior_weights = weights_;

  const bool do_resample =
      config_.resample == ResampleMode::kEveryStep ||
      result.ess < config_.ess_fraction * static_cast<double>(m);
  if (do_resample) {
    resample_streams(weights_);
    result.resampled = true;
  }
  return result;
}

void GpssmMember::resample_streams(const Eigen::VectorXd& weights) {
  const int m = config_.num_particles;
  std::vector<int> ancestors = systematic_resample(weights, m, member_rng_);

  std::vector<int> remaining(m, 0);
  for (int a : ancestors) ++remaining[a];

  Eigen::MatrixXd new_particles(m, config_.state_dim);
  std::vector<BlrBank> new_trans;
  std::vector<BlrBank> new_obs;
  const bool per_particle = !config_.shared_params;
  if (per_particle) {
    new_trans.resize(m);
    new_obs.resize(m);
  }
  for (int i = 0; i < m; ++i) {
    const int a = ancestors[i];
    new_particles.row(i) = particles_.row(a);
    if (per_particle) {
      if (--remaining[a] == 0) {  // last consumer steals the state
        new_trans[i] = std::move(trans_banks_[a]);
        new_obs[i] = std::move(obs_banks_[a]);
      } else {
        new_trans[i] = trans_banks_[a];
        new_obs[i] = obs_banks_[a];
      }
    }
  }
  particles_ = std::move(new_particles);
  if (per_particle) {
    trans_banks_ = std::move(new_trans);
    obs_banks_ = std::move(new_obs);
  }
  last_ancestors_ = std::move(ancestors);
  weights_.setConstant(1.0 / m);
  obs_cache_valid_ = false;
  trans_cache_valid_ = false;
}

Eigen::VectorXd GpssmMember::shared_weigh(const Eigen::VectorXd& y) const {
  return weigh(y, nullptr);
}

StepResult GpssmMember::shared_step(const Eigen::VectorXd& y, Executor* exec) {
  if (config_.obs_dim > 0 && y.size() != config_.obs_dim)
    throw ConfigError("step: observation dimension mismatch");
  propagate(exec);
  if (config_.obs_dim > 0) (void)weigh(y, exec);

  StepResult result;
  {
    // Weight combination identical to the per-particle path.
    const int m = config_.num_particles;
    const Eigen::VectorXd prior_weights = weights_;
    if (config_.obs_dim > 0) {
      Eigen::VectorXd combined =
          prior_weights.array().log() + obs_logdens_.rowwise().sum().array();
      const auto normalized = normalize_log_weights(combined);
      weights_ = normalized.weights;
      result.log_evidence_increment =
          normalized.log_evidence_increment + std::log(static_cast<double>(m));
      result.predictive_mean.resize(config_.obs_dim);
      result.log_predictive.resize(config_.obs_dim);
      for (int d = 0; d < config_.obs_dim; ++d) {
        double mean = 0.0;
        for (int i = 0; i < m; ++i) mean += prior_weights[i] * obs_pred_[i].locations[d];
        result.predictive_mean[d] = mean;
        result.log_predictive[d] = log_sum_exp_minus_log_m(
            (prior_weights.array().log() + obs_logdens_.col(d).array()).matrix()) +
            std::log(static_cast<double>(m));
      }
    }
    result.state_estimate = mmse_estimate(particles_, weights_);
    result.ess = effective_sample_size(weights_);
    result.posterior_weights = weights_;
  }

  // Single shared parameter set, updated with the MMSE path.
  const Eigen::VectorXd xhat = result.state_estimate;
  trans_banks_[0].update(feature_map(xhat_prev_, omega_x_), xhat);
  if (config_.obs_dim > 0) obs_banks_[0].update(feature_map(xhat, omega_y_), y);
  xhat_prev_ = xhat;

  const bool do_resample =
      config_.resample == ResampleMode::kEveryStep ||
      result.ess < config_.ess_fraction * static_cast<double>(config_.num_particles);
  if (do_resample) {
    resample_streams(weights_);
    result.resampled = true;
  }
  return result;
}

void GpssmMember::reseed(std::uint64_t seed) {
  seed_ = seed;
  for (int i = 0; i < config_.num_particles; ++i)
    stream_rngs_[i] = Rng(derive_seed(seed, {kTagStream, static_cast<std::uint64_t>(i)}));
  member_rng_ = Rng(derive_seed(seed, {kTagResample}));
}

// --- serialization ---

namespace {
void write_bank(std::ostream& out, const BlrBank& bank) {
  detail::write_pod(out, bank.a());
  detail::write_vector(out, bank.b());
  detail::write_matrix(out, bank.means());
  detail::write_matrix(out, bank.precision_factor());
  detail::write_pod(out, bank.clamp_count());
}

BlrBank read_bank(std::istream& in) {
  BlrBank bank;
  bank.raw_a() = detail::read_pod<double>(in);
  bank.raw_b() = detail::read_vector(in);
  bank.raw_means() = detail::read_matrix(in);
  bank.raw_factor() = detail::read_matrix(in);
  bank.raw_clamps() = detail::read_pod<std::int64_t>(in);
  return bank;
}

void write_frequencies(std::ostream& out, const FrequencySet& omega) {
  detail::write_matrix(out, omega.frequencies);
  detail::write_pod(out, omega.seed);
  detail::write_vector(out, omega.source.lengthscales);
  detail::write_pod(out, omega.source.variance);
}

FrequencySet read_frequencies(std::istream& in) {
  FrequencySet omega;
  omega.frequencies = detail::read_matrix(in);
  omega.seed = detail::read_pod<std::uint64_t>(in);
  omega.source.lengthscales = detail::read_vector(in);
  omega.source.variance = detail::read_pod<double>(in);
  return omega;
}

void write_config(std::ostream& out, const GpssmConfig& c) {
  detail::write_pod(out, c.state_dim);
  detail::write_pod(out, c.obs_dim);
  detail::write_pod(out, c.num_features_x);
  detail::write_pod(out, c.num_features_y);
  detail::write_pod(out, c.num_particles);
  detail::write_vector(out, c.kernel_x.lengthscales);
  detail::write_pod(out, c.kernel_x.variance);
  detail::write_vector(out, c.kernel_y.lengthscales);
  detail::write_pod(out, c.kernel_y.variance);
  detail::write_pod(out, c.prior_x.a0);
  detail::write_pod(out, c.prior_x.b0);
  detail::write_pod(out, c.prior_y.a0);
  detail::write_pod(out, c.prior_y.b0);
  detail::write_pod(out, c.shared_params);
  detail::write_pod(out, static_cast<int>(c.resample));
  detail::write_pod(out, c.ess_fraction);
  detail::write_pod(out, static_cast<int>(c.likelihood));
  detail::write_pod(out, c.fixed_noise_var);
  detail::write_pod(out, c.memory_limit_bytes);
}

GpssmConfig read_config(std::istream& in) {
  GpssmConfig c;
  c.state_dim = detail::read_pod<int>(in);
  c.obs_dim = detail::read_pod<int>(in);
  c.num_features_x = detail::read_pod<int>(in);
  c.num_features_y = detail::read_pod<int>(in);
  c.num_particles = detail::read_pod<int>(in);
  c.kernel_x.lengthscales = detail::read_vector(in);
  c.kernel_x.variance = detail::read_pod<double>(in);
  c.kernel_y.lengthscales = detail::read_vector(in);
  c.kernel_y.variance = detail::read_pod<double>(in);
  c.prior_x.a0 = detail::read_pod<double>(in);
  c.prior_x.b0 = detail::read_pod<double>(in);
  c.prior_y.a0 = detail::read_pod<double>(in);
  c.prior_y.b0 = detail::read_pod<double>(in);
  c.shared_params = detail::read_pod<bool>(in);
  c.resample = static_cast<ResampleMode>(detail::read_pod<int>(in));
  c.ess_fraction = detail::read_pod<double>(in);
  c.likelihood = static_cast<LikelihoodMode>(detail::read_pod<int>(in));
  c.fixed_noise_var = detail::read_pod<double>(in);
  c.memory_limit_bytes = detail::read_pod<std::uint64_t>(in);
  return c;
}
}  // namespace

void GpssmMember::save(std::ostream& out) const {
  out.write("RFSSMSM1", 8);
  write_config(out, config_);
  detail::write_pod(out, seed_);
  detail::write_pod(out, t_);
  write_frequencies(out, omega_x_);
  write_frequencies(out, omega_y_);
  detail::write_matrix(out, particles_);
  detail::write_matrix(out, prev_particles_);
  detail::write_vector(out, weights_);
  detail::write_pod<std::uint64_t>(out, trans_banks_.size());
  for (const auto& bank : trans_banks_) write_bank(out, bank);
  for (const auto& bank : obs_banks_) write_bank(out, bank);
  for (const auto& rng : stream_rngs_) rng.save(out);
  member_rng_.save(out);
  detail::write_vector(out, xhat_prev_);
  detail::write_int_vector(out, last_ancestors_);
}

GpssmMember GpssmMember::load(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "RFSSMSM1")
    throw IoError("checkpoint: not a gpssm member block");
  GpssmMember member;
  member.config_ = read_config(in).resolved();
  member.seed_ = detail::read_pod<std::uint64_t>(in);
  member.t_ = detail::read_pod<int>(in);
  member.omega_x_ = read_frequencies(in);
  member.omega_y_ = read_frequencies(in);
  member.particles_ = detail::read_matrix(in);
  member.prev_particles_ = detail::read_matrix(in);
  member.weights_ = detail::read_vector(in);
  const auto banks = detail::read_pod<std::uint64_t>(in);
  member.trans_banks_.resize(banks);
  for (auto& bank : member.trans_banks_) bank = read_bank(in);
  member.obs_banks_.resize(banks);
  for (auto& bank : member.obs_banks_) bank = read_bank(in);
  member.stream_rngs_.resize(member.config_.num_particles);
  for (auto& rng : member.stream_rngs_) rng.load(in);
  member.member_rng_.load(in);
  member.xhat_prev_ = detail::read_vector(in);
  member.last_ancestors_ = detail::read_int_vector(in);

  const int m = member.config_.num_particles;
  member.phi_x_.resize(2 * member.config_.num_features_x, m);
  member.phi_y_.resize(2 * member.config_.num_features_y, m);
  member.trans_scratch_.assign(m, {});
  member.obs_scratch_.assign(m, {});
  member.obs_pred_.assign(m, {});
  member.obs_logdens_.resize(m, member.config_.obs_dim);
  return member;
}

}  // namespace rfssm
