#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rfssm/nig.hpp"
#include "rfssm/rng.hpp"
#include "rfssm/spectral.hpp"

namespace rfssm {

class Executor;

enum class LikelihoodMode {
  kStudentT,      // full NIG conjugacy, Student's t predictives
  kGaussianFixed  // ablation: Gaussian predictives with a fixed noise variance
};

enum class ResampleMode {
  kEveryStep,    // resample after every observation
  kEssThreshold  // resample only when ESS < ess_fraction * M
};

struct NigPrior {
  double a0 = 0.0;  // <= 0 means the default 2J + 2
  double b0 = 1.0;

  double resolve_a0(int feature_dim) const {
    return a0 > 0.0 ? a0 : static_cast<double>(feature_dim) + 2.0;
  }
};

struct GpssmConfig {
  int state_dim = 1;       // d_x
  int obs_dim = 1;         // d_y; 0 runs the prior-propagation filter
  int num_features_x = 50; // J_x
  int num_features_y = 50; // J_y
  int num_particles = 500; // M

  // Kernels for the two feature maps; both take x in R^{state_dim}. Empty
  // lengthscales mean all ones.
  KernelSpec kernel_x;
  KernelSpec kernel_y;

  NigPrior prior_x;
  NigPrior prior_y;

  bool shared_params = false;  // one parameter set for all particles
  ResampleMode resample = ResampleMode::kEveryStep;
  double ess_fraction = 0.5;

  LikelihoodMode likelihood = LikelihoodMode::kStudentT;
  double fixed_noise_var = 0.1;

  std::uint64_t memory_limit_bytes = 8ull << 30;

  void validate() const;
  GpssmConfig resolved() const;  // fills kernel defaults, validates
};

struct StepResult {
  Eigen::VectorXd state_estimate;     // MMSE of x_t
  double log_evidence_increment = 0;  // log p_hat(y_t | Y_{t-1})
  Eigen::VectorXd predictive_mean;    // per obs dim, one-step-ahead mean
  Eigen::VectorXd log_predictive;     // per obs dim, mixture log density at y_t
  Eigen::VectorXd posterior_weights;  // per stream, before resampling
  double ess = 0.0;
  bool resampled = false;
};

// One random-feature GP-SSM filter: M particle streams, each carrying NIG
// posteriors for every transition and observation output dimension
// (dimensions of one stream share the precision factor; see BlrBank).
class GpssmMember {
 public:
  GpssmMember() = default;
  GpssmMember(const GpssmConfig& config, std::uint64_t seed);
  // Explicit per-stream seeds (size M); permuting them permutes the streams.
  GpssmMember(const GpssmConfig& config, std::uint64_t seed,
              const std::vector<std::uint64_t>& stream_seeds);

  // --- fine-grained operations ---

  // Samples x_t for every stream from the per-dimension Student's t
  // predictives at phi(x_{t-1}). Requires per-particle parameters.
  void propagate(Executor* exec = nullptr);

  // Conjugate update of every stream/dimension transition posterior with
  // regressor phi(x_{t-1}) and target x_t.
  void update_transition_posteriors(Executor* exec = nullptr);

  // Per-stream log likelihoods of y under the pre-update observation
  // posteriors (the weight formula uses theta_{t-1} and c_{t-1}).
  Eigen::VectorXd weigh(const Eigen::VectorXd& y, Executor* exec = nullptr) const;

  // Conjugate update of the observation posteriors with phi(x_t) and y.
  void update_observation_posteriors(const Eigen::VectorXd& y,
                                     Executor* exec = nullptr);

  // --- whole filter step ---
  // propagate -> transition updates -> weigh (pre-update snapshot) ->
  // observation updates -> normalize -> MMSE -> resample. The fused
  // implementation performs exactly the same arithmetic per stream as the
  // fine-grained sequence.
  StepResult step(const Eigen::VectorXd& y, Executor* exec = nullptr);

  // --- accessors ---
  const GpssmConfig& config() const { return config_; }
  int num_particles() const { return config_.num_particles; }
  int time() const { return t_; }
  const Eigen::MatrixXd& particles() const { return particles_; }       // M x d_x
  const Eigen::MatrixXd& prev_particles() const { return prev_particles_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const FrequencySet& omega_x() const { return omega_x_; }
  const FrequencySet& omega_y() const { return omega_y_; }
  const BlrBank& transition_bank(int stream) const;
  const BlrBank& observation_bank(int stream) const;
  const std::vector<int>& last_ancestors() const { return last_ancestors_; }
  std::int64_t b_clamp_events() const;

  // Per-dim observation predictive components of the streams, filled by the
  // last weigh/step (Student's t: dof/location/scale; Gaussian ablation:
  // dof = 0 and scale = variance).
  const std::vector<BankPredictive>& last_obs_predictives() const {
    return obs_pred_;
  }

  // Fresh derived rng streams for clones (keep-and-drop).
  void reseed(std::uint64_t seed);

  void save(std::ostream& out) const;
  static GpssmMember load(std::istream& in);

 private:
  friend struct GpssmIo;

  void init_particles();
  void ensure_transition_caches() const;
  void ensure_observation_caches(Executor* exec) const;
  StepResult finish_step(const Eigen::VectorXd& y, Executor* exec);
  void resample_streams(const Eigen::VectorXd& weights);
  Eigen::VectorXd shared_weigh(const Eigen::VectorXd& y) const;
  StepResult shared_step(const Eigen::VectorXd& y, Executor* exec);

  GpssmConfig config_;
  std::uint64_t seed_ = 0;
  int t_ = 0;

  FrequencySet omega_x_;
  FrequencySet omega_y_;

  Eigen::MatrixXd particles_;       // M x d_x (time t)
  Eigen::MatrixXd prev_particles_;  // M x d_x (time t-1)
  Eigen::VectorXd weights_;         // normalized

  std::vector<BlrBank> trans_banks_;  // M per-particle (1 when shared)
  std::vector<BlrBank> obs_banks_;

  std::vector<Rng> stream_rngs_;
  Rng member_rng_;

  Eigen::VectorXd xhat_prev_;  // shared-params mode regressor state
  std::vector<int> last_ancestors_;

  // Step caches; valid_* guards let the fine-grained ops reuse work without
  // changing their results.
  mutable Eigen::MatrixXd phi_x_;  // 2J_x x M
  mutable Eigen::MatrixXd phi_y_;  // 2J_y x M
  mutable std::vector<BankScratch> trans_scratch_;
  mutable std::vector<BankScratch> obs_scratch_;
  mutable std::vector<BankPredictive> obs_pred_;
  mutable Eigen::MatrixXd obs_logdens_;  // M x d_y
  mutable bool trans_cache_valid_ = false;
  mutable bool obs_cache_valid_ = false;
};

}  // namespace rfssm
