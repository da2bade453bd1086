#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace morsekit {

/// Counter-based random generator (Philox 4x32-10).
///
/// Streams are reproducible from (seed, stream) alone, independently of call
/// interleaving elsewhere, so experiment configs can pin exact sequences by
/// naming the algorithm ("philox4x32-10") and a seed.
class PhiloxRng {
public:
  explicit PhiloxRng(uint64_t seed, uint64_t stream = 0);

  static const char* algorithm_name() { return "philox4x32-10"; }

  uint32_t next_u32();
  uint64_t next_u64();

  /// Uniform double in [0,1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo,hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0,n).
  uint64_t uniform_index(uint64_t n);
  /// Standard normal via Box-Muller.
  double normal();

private:
  void advance_block();

  std::array<uint32_t, 4> counter_;
  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> block_;
  int pos_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace morsekit
