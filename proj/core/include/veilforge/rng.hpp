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

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace veilforge {

// SplitMix64 avalanche finalizer. Stateless; also used to mix seeds with
// iteration counters and octave indices.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Deterministic seeded random stream (SplitMix64 core, Box-Muller normals).
//
// The generator algorithm is part of the golden-file contract and must not
// change between releases: identical seed + identical call sequence means
// identical output on every platform (normals inherit the last-ulp behaviour
// of the platform's log/sqrt/cos).
//
// Substreams are derived from (seed, label[, index]) so that independent
// modules never share a stream by accident. Deriving a substream does not
// advance the parent.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() noexcept;

    // One Gaussian draw; consumes exactly two uniforms. stddev == 0 yields
    // `mean` exactly. Negative stddev is an error.
    double normal(double mean, double stddev);

    // `count` Gaussian draws in call order.
    std::vector<double> normal_sequence(double mean, double stddev, std::size_t count);

    Rng substream(std::string_view label) const noexcept;
    Rng substream(std::string_view label, std::uint64_t index) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace veilforge
