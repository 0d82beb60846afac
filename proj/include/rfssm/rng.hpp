#pragma once

#include <cstdint>
#include <initializer_list>
#include <istream>
#include <ostream>

namespace rfssm {

// splitmix64 step; used for seed derivation and for seeding the main engine.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives a child seed from a master seed and a tag path, e.g.
// derive_seed(master, {kTagStream, m}). Stable across platforms; different
// paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Tags used to carve per-entity rng streams out of one master seed. The
// single-layer filter uses the layer-1 tags so that a depth-1 deep filter
// consumes randomness in exactly the same order.
inline constexpr std::uint64_t kTagOmegaLayer = 1;  // + layer index (1-based)
inline constexpr std::uint64_t kTagOmegaObs = 2;
inline constexpr std::uint64_t kTagStream = 3;  // + stream index
inline constexpr std::uint64_t kTagResample = 4;
inline constexpr std::uint64_t kTagDictionary = 5;  // + member index
inline constexpr std::uint64_t kTagClone = 6;       // + event counter, slot
inline constexpr std::uint64_t kTagGenerator = 7;
inline constexpr std::uint64_t kTagInit = 8;

// Small counter-free PRNG (xoshiro256++) with explicit, compact state.
// Distribution sampling is implemented here rather than with <random>
// adaptors so that draws are identical across standard libraries and the
// state serializes to 32 bytes in checkpoints.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1]; used where log(u) must stay finite.
  double uniform_pos();

  // Standard normal via Box-Muller (two uniforms per draw).
  double normal();

  // Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  double chi_squared(double dof);

  // Standard Student's t with dof degrees of freedom.
  double student_t(double dof);

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  bool operator==(const Rng& other) const = default;

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  std::uint64_t s_[4];
};

}  // namespace rfssm
