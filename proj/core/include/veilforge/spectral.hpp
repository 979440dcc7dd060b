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

#include <complex>
#include <vector>

#include "veilforge/tensor.hpp"

namespace veilforge {

// Complex spectrum of an image, DC at index (0,0). u indexes row frequency
// (height), v column frequency (width). Centered views remap indices to
// signed frequencies in [-H/2, H/2) x [-W/2, W/2).
class FrequencyGrid {
public:
    FrequencyGrid() = default;
    FrequencyGrid(int height, int width, int channels);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }

    std::complex<double>& at(int u, int v, int c = 0) noexcept {
        return coeffs_[(static_cast<std::size_t>(u) * width_ + v) * channels_ + c];
    }
    std::complex<double> at(int u, int v, int c = 0) const noexcept {
        return coeffs_[(static_cast<std::size_t>(u) * width_ + v) * channels_ + c];
    }

    // Signed frequency of a raw index: idx in [0, n) maps to [-n/2, n/2).
    static int signed_freq(int idx, int n) noexcept {
        return idx <= (n - 1) / 2 ? idx : idx - n;
    }

    // Coefficient at signed frequencies (fu, fv).
    std::complex<double> centered(int fu, int fv, int c = 0) const noexcept {
        const int u = fu < 0 ? fu + height_ : fu;
        const int v = fv < 0 ? fv + width_ : fv;
        return at(u, v, c);
    }

    // Sum of |F(u,v)|^2 over all coefficients and channels.
    double total_energy() const noexcept;

    std::span<std::complex<double>> data() noexcept { return coeffs_; }
    std::span<const std::complex<double>> data() const noexcept { return coeffs_; }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<std::complex<double>> coeffs_;
};

struct HighPassSpec {
    enum class Mode { kFixed, kEnergyFraction };
    Mode mode = Mode::kEnergyFraction;
    double omega_c = 0.0;         // radial cutoff, active when mode == kFixed
    double energy_fraction = 0.5; // rho in (0,1), active when mode == kEnergyFraction

    void validate() const;
};

// Unnormalized forward 2-D DFT of each channel (radix-2 fast path for
// power-of-two extents, direct summation otherwise).
FrequencyGrid dft2(const ImageTensor& img);

// Inverse transform with 1/(H*W) normalization. The grid must carry the
// conjugate symmetry of a real image: any imaginary residue above 1e-7 in
// the reconstruction raises NumericError naming the offending magnitude.
ImageTensor idft2(const FrequencyGrid& grid);

// Zero every coefficient whose centered radius sqrt(fu^2+fv^2) is <= cutoff;
// strictly higher radii pass through untouched. cutoff 0 removes only DC.
FrequencyGrid high_pass(const FrequencyGrid& grid, double cutoff);

// Fixed mode returns omega_c verbatim. Energy-fraction mode returns the
// smallest centered radius whose enclosed spectral energy (channels summed,
// radii grouped exactly via integer fu^2+fv^2) reaches rho of the total.
double resolve_cutoff(const FrequencyGrid& grid, const HighPassSpec& spec);

} // namespace veilforge
