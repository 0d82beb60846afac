#include "rfssm/spectral.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "rfssm/errors.hpp"
#include "rfssm/rng.hpp"

namespace rfssm {

void KernelSpec::validate() const {
  if (lengthscales.size() == 0) throw ConfigError("kernel spec has no lengthscales");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!(lengthscales[i] > 0.0) || !std::isfinite(lengthscales[i]))
      throw ConfigError("kernel lengthscale must be positive and finite");
  }
  if (!(variance > 0.0) || !std::isfinite(variance))
    throw ConfigError("kernel variance must be positive and finite");
}

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& lengthscales) {
  const Eigen::VectorXd scaled = (a - b).cwiseQuotient(lengthscales);
  return std::exp(-0.5 * scaled.squaredNorm());
}

FrequencySet sample_frequencies(const KernelSpec& spec, int num_frequencies,
                                int input_dim, std::uint64_t seed) {
  spec.validate();
  if (num_frequencies < 1) throw ConfigError("need at least one frequency");
  if (input_dim < 1) throw ConfigError("input dimension must be >= 1");
  if (spec.lengthscales.size() != input_dim)
    throw ConfigError("kernel lengthscale count does not match input dimension");

  FrequencySet set;
  set.seed = seed;
  set.source = spec;
  set.frequencies.resize(num_frequencies, input_dim);
  Rng rng(seed);
  for (int j = 0; j < num_frequencies; ++j)
    for (int k = 0; k < input_dim; ++k)
      set.frequencies(j, k) = rng.normal() / spec.lengthscales[k];
  return set;
}

void feature_map_into(const Eigen::VectorXd& x, const FrequencySet& omega,
                      Eigen::Ref<Eigen::VectorXd> out) {
  if (x.size() != omega.input_dim())
    throw ConfigError("feature_map: input dimension mismatch");
  const int J = omega.count();
  const double scale = 1.0 / std::sqrt(static_cast<double>(J));
  Eigen::VectorXd proj = omega.frequencies * x;
  for (int j = 0; j < J; ++j) {
#if defined(__GNUC__) && !defined(__APPLE__)
    double s, c;
    ::sincos(proj[j], &s, &c);
#else
    const double s = std::sin(proj[j]);
    const double c = std::cos(proj[j]);
#endif
    out[2 * j] = scale * s;
    out[2 * j + 1] = scale * c;
  }
}

void feature_map(const Eigen::VectorXd& x, const FrequencySet& omega,
                 Eigen::VectorXd& out) {
  out.resize(2 * omega.count());
  feature_map_into(x, omega, out);
}

Eigen::VectorXd feature_map(const Eigen::VectorXd& x, const FrequencySet& omega) {
  Eigen::VectorXd out;
  feature_map(x, omega, out);
  return out;
}

std::vector<KernelSpec> sample_dictionary_specs(const std::vector<double>& grid,
                                                int num_members, int input_dim,
                                                std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("lengthscale grid is empty");
  for (double g : grid)
    if (!(g > 0.0)) throw ConfigError("lengthscale grid entries must be positive");
  if (num_members < 1) throw ConfigError("dictionary needs at least one member");
  if (input_dim < 1) throw ConfigError("input dimension must be >= 1");

  std::vector<KernelSpec> specs(num_members);
  for (int s = 0; s < num_members; ++s) {
    Rng rng(derive_seed(seed, {kTagDictionary, static_cast<std::uint64_t>(s)}));
    KernelSpec spec;
    spec.lengthscales.resize(input_dim);
    for (int k = 0; k < input_dim; ++k)
      spec.lengthscales[k] = grid[rng.below(grid.size())];
    specs[s] = std::move(spec);
  }
  return specs;
}

std::vector<FrequencySet> build_dictionary(const std::vector<double>& grid,
                                           int num_members, int num_frequencies,
                                           int input_dim, std::uint64_t seed) {
  const std::vector<KernelSpec> specs =
      sample_dictionary_specs(grid, num_members, input_dim, seed);
  std::vector<FrequencySet> sets;
  sets.reserve(specs.size());
  for (int s = 0; s < num_members; ++s) {
    const std::uint64_t member_seed =
        derive_seed(seed, {kTagDictionary, static_cast<std::uint64_t>(s), 0});
    sets.push_back(sample_frequencies(specs[s], num_frequencies, input_dim, member_seed));
  }
  return sets;
}

void write_frequency_set(std::ostream& out, const FrequencySet& omega) {
  out.precision(17);
  out << "J,d,family,seed,variance";
  for (int k = 0; k < omega.input_dim(); ++k) out << ",l" << (k + 1);
  out << '\n';
  out << omega.count() << ',' << omega.input_dim() << ",rbf," << omega.seed << ','
      << omega.source.variance;
  for (int k = 0; k < omega.input_dim(); ++k) out << ',' << omega.source.lengthscales[k];
  out << '\n';
  for (int j = 0; j < omega.count(); ++j) {
    for (int k = 0; k < omega.input_dim(); ++k) {
      if (k) out << ',';
      out << omega.frequencies(j, k);
    }
    out << '\n';
  }
}

FrequencySet read_frequency_set(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("frequency set: missing header");
  if (line.rfind("J,d,family,seed,variance", 0) != 0)
    throw IoError("frequency set: unexpected header: " + line);
  if (!std::getline(in, line)) throw IoError("frequency set: missing metadata row");

  std::stringstream meta(line);
  std::string field;
  auto next = [&]() {
    if (!std::getline(meta, field, ',')) throw IoError("frequency set: truncated metadata");
    return field;
  };
  const int J = std::stoi(next());
  const int d = std::stoi(next());
  const std::string family = next();
  if (family != "rbf") throw IoError("frequency set: unknown kernel family: " + family);
  FrequencySet set;
  set.seed = std::stoull(next());
  set.source.variance = std::stod(next());
  set.source.lengthscales.resize(d);
  for (int k = 0; k < d; ++k) set.source.lengthscales[k] = std::stod(next());

  set.frequencies.resize(J, d);
  for (int j = 0; j < J; ++j) {
    if (!std::getline(in, line)) throw IoError("frequency set: truncated matrix");
    std::stringstream row(line);
    for (int k = 0; k < d; ++k) {
      if (!std::getline(row, field, ','))
        throw IoError("frequency set: truncated matrix row");
      set.frequencies(j, k) = std::stod(field);
    }
  }
  return set;
}

}  // namespace rfssm
