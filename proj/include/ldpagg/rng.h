// Copyright 2026 The ldpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPAGG_RNG_H_
#define LDPAGG_RNG_H_

#include <cstdint>
#include <random>

namespace ldpagg {

// Named per-agent streams. Each agent owns one engine per tag.
enum class StreamTag : uint64_t {
  kData = 1,
  kNoiseX = 2,
  kNoiseY = 3,
  kNoiseZ = 4,
  kInit = 5,
};

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// Seed of run `run_index` derived from the experiment master seed.
uint64_t RunSeed(uint64_t master_seed, uint64_t run_index);

// Seed of one agent stream:
//   Mix64(Mix64(Mix64(run_seed) ^ (agent + 1)) ^ tag).
// Depends only on its arguments, never on scheduling.
uint64_t StreamSeed(uint64_t run_seed, int agent, StreamTag tag);

// A 64-bit Mersenne Twister with the conversions used across the library.
// Conversions are written out explicitly so draws are identical on every
// standard library.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(uint64_t seed) : engine_(seed) {}

  uint64_t NextBits() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double UniformOpen() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * UniformOpen(); }

  // Standard normal via Box-Muller; consumes two draws.
  double Normal();

  // Uniform index in [0, n).
  uint64_t Index(uint64_t n);

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.engine_ == b.engine_;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ldpagg

#endif  // LDPAGG_RNG_H_
