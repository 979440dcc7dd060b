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

#include "veilforge/tensor.hpp"

namespace veilforge {

// Multi-octave gradient-lattice noise configuration. Octave k contributes
// persistence^k * lattice_noise(lacunarity^k * p / base_scale, seed ^ k),
// so |field| <= sum_k persistence^k everywhere.
struct NoiseSpec {
    int octaves = 4;
    double persistence = 0.5; // in (0, 1]
    double lacunarity = 2.0;  // > 1
    double base_scale = 16.0; // pixels per lattice cell at octave 0
    std::uint64_t seed = 0;

    void validate() const;
    double amplitude_bound() const; // sum_{k<octaves} persistence^k
};

// Single-octave gradient noise: hash-derived unit gradients on the integer
// lattice, quintic fade interpolation. Value lies in [-1, 1], is exactly 0
// at integer lattice points, and depends only on (x, y, seed).
double lattice_noise(double x, double y, std::uint64_t seed);

// Octave-summed field sampled at pixel centers (x = column, y = row).
// Single-channel, height x width.
ImageTensor octave_field(const NoiseSpec& spec, int height, int width);

// octave_field with the seed remixed per iteration index; consecutive t
// give decorrelated fields.
ImageTensor temporal_field(const NoiseSpec& spec, std::uint64_t t, int height, int width);

} // namespace veilforge
