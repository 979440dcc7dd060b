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

#include "veilforge/noise.hpp"

#include <cmath>

#include "veilforge/errors.hpp"
#include "veilforge/rng.hpp"

namespace veilforge {

namespace {

// 16 unit gradient directions at multiples of 22.5 degrees, spelled out as
// literals so the lattice is bit-stable across libm implementations.
constexpr double kCos16[16] = {
    1.0, 0.9238795325112867, 0.7071067811865476, 0.3826834323650898,
    0.0, -0.3826834323650898, -0.7071067811865476, -0.9238795325112867,
    -1.0, -0.9238795325112867, -0.7071067811865476, -0.3826834323650898,
    0.0, 0.3826834323650898, 0.7071067811865476, 0.9238795325112867};
constexpr double kSin16[16] = {
    0.0, 0.3826834323650898, 0.7071067811865476, 0.9238795325112867,
    1.0, 0.9238795325112867, 0.7071067811865476, 0.3826834323650898,
    0.0, -0.3826834323650898, -0.7071067811865476, -0.9238795325112867,
    -1.0, -0.9238795325112867, -0.7071067811865476, -0.3826834323650898};

inline std::uint64_t corner_hash(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
    std::uint64_t h = mix64(seed ^ 0x632be59bd9b4e019ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(ix));
    h = mix64(h ^ static_cast<std::uint64_t>(iy));
    return h;
}

inline double fade(double t) {
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

inline double lerp(double a, double b, double t) {
    return a + (b - a) * t;
}

inline double corner_dot(std::int64_t ix, std::int64_t iy, double dx, double dy,
                         std::uint64_t seed) {
    const std::uint64_t h = corner_hash(ix, iy, seed) & 15;
    return kCos16[h] * dx + kSin16[h] * dy;
}

} // namespace

void NoiseSpec::validate() const {
    if (octaves < 1) throw ValueError("NoiseSpec: octaves must be >= 1");
    if (!(persistence > 0.0 && persistence <= 1.0)) {
        throw ValueError("NoiseSpec: persistence must lie in (0,1]");
    }
    if (!(lacunarity > 1.0)) throw ValueError("NoiseSpec: lacunarity must be > 1");
    if (!(base_scale > 0.0)) throw ValueError("NoiseSpec: base_scale must be > 0");
}

double NoiseSpec::amplitude_bound() const {
    double bound = 0.0;
    double amp = 1.0;
    for (int k = 0; k < octaves; ++k) {
        bound += amp;
        amp *= persistence;
    }
    return bound;
}

double lattice_noise(double x, double y, std::uint64_t seed) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const double dx = x - fx;
    const double dy = y - fy;

    const double d00 = corner_dot(ix, iy, dx, dy, seed);
    const double d10 = corner_dot(ix + 1, iy, dx - 1.0, dy, seed);
    const double d01 = corner_dot(ix, iy + 1, dx, dy - 1.0, seed);
    const double d11 = corner_dot(ix + 1, iy + 1, dx - 1.0, dy - 1.0, seed);

    const double u = fade(dx);
    const double v = fade(dy);
    return lerp(lerp(d00, d10, u), lerp(d01, d11, u), v);
}

ImageTensor octave_field(const NoiseSpec& spec, int height, int width) {
    spec.validate();
    ImageTensor field(height, width, 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double value = 0.0;
            double amp = 1.0;
            double freq = 1.0 / spec.base_scale;
            for (int k = 0; k < spec.octaves; ++k) {
                value += amp * lattice_noise(x * freq, y * freq,
                                             spec.seed ^ static_cast<std::uint64_t>(k));
                amp *= spec.persistence;
                freq *= spec.lacunarity;
            }
            field.at(y, x) = value;
        }
    }
    return field;
}

ImageTensor temporal_field(const NoiseSpec& spec, std::uint64_t t, int height, int width) {
    spec.validate();
    NoiseSpec per_step = spec;
    per_step.seed = Rng(spec.seed).substream("temporal", t).seed();
    return octave_field(per_step, height, width);
}

} // namespace veilforge
