// voxanon/random.h

// Copyright 2026  The voxanon Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef VOXANON_RANDOM_H_
#define VOXANON_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace voxanon {

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t StableHash(std::string_view bytes);

// Derives an engine seed from a run seed, a key (usually an utterance id) and
// a salt that separates independent uses of the same key.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key,
                         std::string_view salt);

/// Deterministic random stream keyed by (seed, key, salt).
///
/// Uniform draws are built directly from std::mt19937_64 output, whose
/// sequence is fixed by the standard, so they reproduce bit-for-bit on any
/// conforming library.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::string_view key,
               std::string_view salt = {});

  std::uint64_t NextU64() { return engine_(); }

  // Strictly inside (0, 1).
  double Uniform01();

  // Strictly inside (lo, hi) when lo < hi; exactly lo when lo == hi.
  double Uniform(double lo, double hi);

  double Normal(double mean = 0.0, double stddev = 1.0);

  std::size_t Index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace voxanon

#endif  // VOXANON_RANDOM_H_
