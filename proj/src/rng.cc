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

#include "ldpagg/rng.h"

#include <cmath>
#include <numbers>

namespace ldpagg {

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t RunSeed(uint64_t master_seed, uint64_t run_index) {
  return Mix64(Mix64(master_seed) ^ Mix64(run_index + 0x5eedULL));
}

uint64_t StreamSeed(uint64_t run_seed, int agent, StreamTag tag) {
  uint64_t h = Mix64(run_seed);
  h = Mix64(h ^ static_cast<uint64_t>(agent + 1));
  return Mix64(h ^ static_cast<uint64_t>(tag));
}

double RngStream::Normal() {
  const double u1 = UniformOpen();
  const double u2 = UniformOpen();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t RngStream::Index(uint64_t n) {
  // Rejection sampling keeps the index exactly uniform.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t bits;
  do {
    bits = engine_();
  } while (bits >= limit);
  return bits % n;
}

}  // namespace ldpagg
