#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "linpred/linalg.hpp"

namespace linpred {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key and the
/// 64-bit stream id occupies the upper half of the counter, so every
/// (seed, stream) pair is an independent sequence that can be created in any
/// order on any thread.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Ten-round bijection applied to one counter block.
  static Block encrypt(Block counter, std::array<std::uint32_t, 2> key) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int next_ = 4;
};

double standard_normal(Philox4x32& engine);
double uniform01(Philox4x32& engine);

Vector standard_normal_vector(Philox4x32& engine, Index n);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed by R).
Matrix haar_orthogonal(Philox4x32& engine, Index p);

}  // namespace linpred
