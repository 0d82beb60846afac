#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rfssm {

enum class KernelFamily { kRbf };

// Shift-invariant kernel hyperparameters: per-input-dimension lengthscales
// and a prior variance. Only the RBF family is implemented; the family tag
// keeps the serialized form extensible.
struct KernelSpec {
  KernelFamily family = KernelFamily::kRbf;
  Eigen::VectorXd lengthscales;  // size d, all > 0
  double variance = 1.0;         // prior variance sigma^2_lambda

  void validate() const;  // throws ConfigError
};

// Exact RBF kernel value for the given lengthscales (unit variance).
double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& lengthscales);

// A spectral sample set: J frequency vectors of dimension d defining one
// trigonometric feature map. Reproducible from (spec, J, d, seed).
struct FrequencySet {
  Eigen::MatrixXd frequencies;  // J x d, row j = omega^j
  std::uint64_t seed = 0;
  KernelSpec source;

  int count() const { return static_cast<int>(frequencies.rows()); }
  int input_dim() const { return static_cast<int>(frequencies.cols()); }
  int feature_dim() const { return 2 * count(); }
};

// Draws J frequency vectors from the spectral density of the kernel. For RBF
// with lengthscales l the density is N(0, diag(1/l^2)).
FrequencySet sample_frequencies(const KernelSpec& spec, int num_frequencies,
                                int input_dim, std::uint64_t seed);

// Fills `out` (resized to 2J) with
//   (1/sqrt(J)) [sin(x'w^1), cos(x'w^1), ..., sin(x'w^J), cos(x'w^J)].
// The interleaved sin/cos order is part of the file format contract.
void feature_map(const Eigen::VectorXd& x, const FrequencySet& omega,
                 Eigen::VectorXd& out);
Eigen::VectorXd feature_map(const Eigen::VectorXd& x, const FrequencySet& omega);
// Variant writing into pre-sized storage (e.g. a matrix column).
void feature_map_into(const Eigen::VectorXd& x, const FrequencySet& omega,
                      Eigen::Ref<Eigen::VectorXd> out);

// Kernel dictionary for ensembles: S specs whose per-dimension lengthscales
// are drawn independently and uniformly from `grid`. Member s derives its own
// seed from (seed, s), so dictionaries are reproducible and order-independent.
std::vector<KernelSpec> sample_dictionary_specs(const std::vector<double>& grid,
                                                int num_members, int input_dim,
                                                std::uint64_t seed);
std::vector<FrequencySet> build_dictionary(const std::vector<double>& grid,
                                           int num_members, int num_frequencies,
                                           int input_dim, std::uint64_t seed);

// Flat CSV layout: header row (J, d, family, seed, variance, lengthscales),
// then the J x d frequency matrix, row-major.
void write_frequency_set(std::ostream& out, const FrequencySet& omega);
FrequencySet read_frequency_set(std::istream& in);

}  // namespace rfssm
