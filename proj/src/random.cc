// random.cc

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

#include "voxanon/random.h"

namespace voxanon {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t StableHash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view key,
                         std::string_view salt) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ StableHash(key));
  h = SplitMix64(h ^ StableHash(salt));
  return h;
}

SeededStream::SeededStream(std::uint64_t seed, std::string_view key,
                           std::string_view salt)
    : engine_(DeriveSeed(seed, key, salt)) {}

double SeededStream::Uniform01() {
  // 53 random mantissa bits, offset by half a step so 0 is never produced.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededStream::Uniform(double lo, double hi) {
  if (lo == hi) return lo;
  double u = lo + (hi - lo) * Uniform01();
  // Rounding can land on an endpoint when the interval is narrow.
  if (u <= lo || u >= hi) u = lo + 0.5 * (hi - lo);
  return u;
}

double SeededStream::Normal(double mean, double stddev) {
  return mean + stddev * normal_(engine_);
}

std::size_t SeededStream::Index(std::size_t n) {
  return static_cast<std::size_t>(Uniform01() * static_cast<double>(n)) % n;
}

}  // namespace voxanon
