// Copyright 2026 The trackfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRACKFUSE__RNG_HPP_
#define TRACKFUSE__RNG_HPP_

#include <cstdint>

namespace trackfuse
{

/// SplitMix64 (Steele, Lea, Flood 2014): a 64-bit counter advanced by the
/// golden-ratio increment and passed through a fixed avalanche mix.
///
/// - uniform(): top 53 bits scaled by 2^-53, in [0, 1).
/// - normal(): Box-Muller cosine branch with u1 = 1 - uniform(), u2 = uniform().
///
/// The sequence depends only on the seed, so generated scenarios can be
/// reproduced in any language that implements the same three steps.
class SplitMix64
{
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent stream derived from (seed, stream).
  static SplitMix64 derive(std::uint64_t seed, std::uint64_t stream);

private:
  std::uint64_t state_;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

}  // namespace trackfuse

#endif  // TRACKFUSE__RNG_HPP_
