// Copyright 2026 The rwrs-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RWRS_RNG_H_
#define RWRS_RNG_H_

#include <array>
#include <cstdint>
#include <limits>

namespace rwrs {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Purpose tags for deriving independent streams from one experiment seed.
enum class StreamTag : std::uint64_t {
  kReplica = 0x7265706c69636100ULL,
  kWalk = 0x77616c6b00000000ULL,
  kScenery = 0x7363656e65727900ULL,
  kTilted = 0x74696c7465640000ULL,
};

// Seed of sub-stream `index` under `tag`. Distinct (tag, index) pairs give
// unrelated seeds; the mapping is a pure function.
constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag,
                                    std::uint64_t index = 0) {
  return mix64(mix64(seed ^ static_cast<std::uint64_t>(tag)) + mix64(index));
}

// Philox4x32-10 (Salmon et al., SC'11). Counter-based: the output at a given
// (key, stream, position) is a pure function, so streams split without
// coordination. Counter words are {position_lo, position_hi, stream_lo,
// stream_hi}; one block yields four 32-bit words.
class Philox {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox(std::uint64_t key, std::uint64_t stream = 0,
                  std::uint64_t position = 0)
      : key_(key), stream_(stream), position_(position) {}

  static Block generate(const Block& counter, std::array<std::uint32_t, 2> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (used_ == 4) refill();
    return buffer_[used_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Uniform integer in [0, bound), Lemire's nearly-divisionless method.
  std::uint32_t below(std::uint32_t bound);

  // Standard normal by Box-Muller; consumes exactly four words per call.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t position_;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace rwrs

#endif  // RWRS_RNG_H_
