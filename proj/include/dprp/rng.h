// Copyright 2026 The dprp Authors.
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

#ifndef DPRP_RNG_H_
#define DPRP_RNG_H_

#include <cstdint>
#include <limits>
#include <string_view>

namespace dprp {

// Well-known stream ids. The projection operator and the privacy noise never
// share a stream.
inline constexpr uint64_t kProjectionStream = 1;
inline constexpr uint64_t kNoiseStream = 2;
inline constexpr uint64_t kDataStream = 3;

// Counter-based splittable generator. Output n of a stream is a bijective
// 64-bit mix of (key + n * golden), where key is derived from (seed, stream
// id). Identical (seed, stream id) pairs reproduce identical sequences on every
// platform; samplers below avoid std:: distributions for the same reason.
//
// Satisfies std::uniform_random_bit_generator.
class RngStream {
 public:
  using result_type = uint64_t;

  RngStream(uint64_t seed, uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  // Child stream keyed by a label. Splitting does not advance this stream.
  RngStream Split(uint64_t label) const;
  RngStream Split(std::string_view label) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1).
  double UniformOpen();
  // Unbiased integer in [0, n).
  uint64_t Below(uint64_t n);
  double Gaussian();
  double Laplace(double scale);
  bool Bernoulli(double p);
  // +1 or -1 with equal probability.
  int Rademacher();

 private:
  RngStream(uint64_t seed, uint64_t stream_id, uint64_t key)
      : seed_(seed), stream_id_(stream_id), key_(key) {}

  uint64_t seed_;
  uint64_t stream_id_;
  uint64_t key_;
  uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0;
};

// SplitMix64 finaliser.
uint64_t Mix64(uint64_t x);

}  // namespace dprp

#endif  // DPRP_RNG_H_
