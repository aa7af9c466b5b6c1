#pragma once

// Counter-based SplitMix64 stream. The full definition (so that other
// implementations can reproduce every instance) is in docs/rng.md:
//
//   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            z =  z ^ (z >> 31)
//   key            = mix(seed + G * (stream + 1))
//   output(counter) = mix(key + G * (counter + 1)),   G = 0x9E3779B97F4A7C15
//
// uniform() = (output >> 11) * 2^-53; normal() consumes two uniforms u1, u2 and
// returns sqrt(-2 log(1 - u1)) * cos(2 pi u2).

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace ltgap {

class SplitMix64 {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  SplitMix64(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed + kGamma * (stream + 1))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() noexcept { return mix(key_ + kGamma * (++counter_)); }
  std::uint64_t counter() const noexcept { return counter_; }

  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept;
  /// Uniform integer in [0, n) by multiply-shift on the top 53 bits.
  std::size_t below(std::size_t n) noexcept;
  /// Uniform integer in [lo, hi].
  std::size_t between(std::size_t lo, std::size_t hi) noexcept { return lo + below(hi - lo + 1); }

  Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols) noexcept;
  /// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed).
  Eigen::MatrixXd orthogonal(Eigen::Index n);
  /// Orthonormal basis (n x k) of a uniformly random k-dimensional subspace.
  Eigen::MatrixXd subspace(Eigen::Index n, Eigen::Index k);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ltgap
