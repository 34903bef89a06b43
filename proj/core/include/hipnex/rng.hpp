#pragma once

#include <cstdint>
#include <random>

#include "hipnex/core.hpp"

namespace hipnex {

/// Seedable generator with platform-stable output.
///
/// std::mt19937_64 is fully specified by the standard, but the standard
/// distributions are not, so uniforms and normals are derived here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

  Vector normal_vector(int n);
  Matrix normal_matrix(int rows, int cols);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a stream label.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// FNV-1a over the raw bytes of a vector; used to compare shared inputs.
std::uint64_t hash_vector(const Vector& v);

}  // namespace hipnex
