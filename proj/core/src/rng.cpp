// Copyright 2026 The VeilForge Authors
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

#include "veilforge/rng.hpp"

#include <cmath>
#include <numbers>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

Rng::Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

std::uint64_t Rng::next_u64() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

double Rng::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal(double mean, double stddev) {
    if (!(stddev >= 0.0)) {
        throw ValueError("Rng::normal: stddev must be >= 0");
    }
    // Box-Muller, cosine branch only: a fixed two-uniform cost per draw keeps
    // pixel-indexed substreams aligned.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

std::vector<double> Rng::normal_sequence(double mean, double stddev, std::size_t count) {
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(normal(mean, stddev));
    }
    return out;
}

Rng Rng::substream(std::string_view label) const noexcept {
    return Rng(mix64(seed_ ^ fnv1a64(label)));
}

Rng Rng::substream(std::string_view label, std::uint64_t index) const noexcept {
    return Rng(mix64(mix64(seed_ ^ fnv1a64(label)) ^ index));
}

} // namespace veilforge
