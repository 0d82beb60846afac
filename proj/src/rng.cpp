#include "rfssm/rng.hpp"

#include <cmath>
#include <numbers>

namespace rfssm {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t state = master;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t tag : path) {
    state ^= tag + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2);
    out = splitmix64(state);
  }
  return out;
}

Rng::Rng(std::uint64_t seed) {
  // xoshiro state must not be all zero; splitmix64 seeding guarantees that
  // with overwhelming probability, and we nudge the seed if it happens.
  std::uint64_t sm = seed;
  for (int i = 0; i < 4; ++i) s_[i] = splitmix64(sm);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ull;
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return 1.0 - uniform();
}

double Rng::normal() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    // Boost the shape and correct with a power of a uniform.
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::chi_squared(double dof) {
  return 2.0 * gamma(0.5 * dof);
}

double Rng::student_t(double dof) {
  const double z = normal();
  const double v = chi_squared(dof);
  return z / std::sqrt(v / dof);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection-free multiply-shift; bias is negligible for filter-sized n.
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

void Rng::save(std::ostream& out) const {
  out.write(reinterpret_cast<const char*>(s_), sizeof(s_));
}

void Rng::load(std::istream& in) {
  in.read(reinterpret_cast<char*>(s_), sizeof(s_));
}

}  // namespace rfssm
