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

#include "veilforge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <sstream>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

using cd = std::complex<double>;

bool is_pow2(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

// In-place iterative radix-2 Cooley-Tukey. sign = -1 forward, +1 inverse
// (no normalization here).
void fft_pow2(std::vector<cd>& v, int sign) {
    const int n = static_cast<int>(v.size());
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / len;
        const cd wlen(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const cd a = v[i + k];
                const cd b = v[i + k + len / 2] * w;
                v[i + k] = a + b;
                v[i + k + len / 2] = a - b;
                w *= wlen;
            }
        }
    }
}

// Direct O(n^2) transform with a precomputed twiddle table; used for
// non-power-of-two extents.
void dft_direct(std::vector<cd>& v, int sign, const std::vector<cd>& twiddle) {
    const int n = static_cast<int>(v.size());
    std::vector<cd> out(n);
    for (int k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (int j = 0; j < n; ++j) {
            acc += v[j] * twiddle[static_cast<std::size_t>(k) * j % n];
        }
        out[k] = acc;
    }
    v = std::move(out);
}

std::vector<cd> make_twiddle(int n, int sign) {
    std::vector<cd> t(n);
    for (int k = 0; k < n; ++k) {
        const double ang = sign * 2.0 * std::numbers::pi * k / n;
        t[k] = cd(std::cos(ang), std::sin(ang));
    }
    return t;
}

void transform_1d(std::vector<cd>& v, int sign, const std::vector<cd>& twiddle) {
    if (is_pow2(static_cast<int>(v.size()))) {
        fft_pow2(v, sign);
    } else {
        dft_direct(v, sign, twiddle);
    }
}

// Applies the 1-D transform along rows then columns of one channel.
void transform_2d(FrequencyGrid& g, int channel, int sign) {
    const int h = g.height();
    const int w = g.width();
    const std::vector<cd> tw_w = is_pow2(w) ? std::vector<cd>{} : make_twiddle(w, sign);
    const std::vector<cd> tw_h = is_pow2(h) ? std::vector<cd>{} : make_twiddle(h, sign);

    std::vector<cd> line;
    line.resize(w);
    for (int u = 0; u < h; ++u) {
        for (int v = 0; v < w; ++v) line[v] = g.at(u, v, channel);
        transform_1d(line, sign, tw_w);
        for (int v = 0; v < w; ++v) g.at(u, v, channel) = line[v];
    }
    line.resize(h);
    for (int v = 0; v < w; ++v) {
        for (int u = 0; u < h; ++u) line[u] = g.at(u, v, channel);
        transform_1d(line, sign, tw_h);
        for (int u = 0; u < h; ++u) g.at(u, v, channel) = line[u];
    }
}

} // namespace

FrequencyGrid::FrequencyGrid(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
    if (height < 1 || width < 1 || channels < 1) {
        throw ValueError("FrequencyGrid: dimensions must be >= 1");
    }
    coeffs_.assign(static_cast<std::size_t>(height) * width * channels, cd{});
}

double FrequencyGrid::total_energy() const noexcept {
    double acc = 0.0;
    for (const auto& c : coeffs_) acc += std::norm(c);
    return acc;
}

void HighPassSpec::validate() const {
    if (mode == Mode::kFixed) {
        if (!(omega_c >= 0.0)) throw ValueError("HighPassSpec: omega_c must be >= 0");
    } else {
        if (!(energy_fraction > 0.0 && energy_fraction < 1.0)) {
            throw ValueError("HighPassSpec: energy_fraction must lie in (0,1)");
        }
    }
}

FrequencyGrid dft2(const ImageTensor& img) {
    validate_finite(img, "dft2");
    FrequencyGrid g(img.height(), img.width(), img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                g.at(y, x, c) = cd(img.at(y, x, c), 0.0);
            }
        }
        transform_2d(g, c, -1);
    }
    return g;
}

ImageTensor idft2(const FrequencyGrid& grid) {
    for (const auto& c : grid.data()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            throw NumericError("idft2: non-finite coefficient");
        }
    }
    FrequencyGrid g = grid;
    ImageTensor out(g.height(), g.width(), g.channels());
    const double norm = 1.0 / (static_cast<double>(g.height()) * g.width());
    double worst_imag = 0.0;
    for (int c = 0; c < g.channels(); ++c) {
        transform_2d(g, c, +1);
        for (int y = 0; y < g.height(); ++y) {
            for (int x = 0; x < g.width(); ++x) {
                const cd v = g.at(y, x, c) * norm;
                worst_imag = std::max(worst_imag, std::abs(v.imag()));
                out.at(y, x, c) = v.real();
            }
        }
    }
    if (worst_imag > 1e-7) {
        std::ostringstream msg;
        msg << "idft2: conjugate symmetry violated, imaginary residue " << worst_imag;
        throw NumericError(msg.str());
    }
    return out;
}

FrequencyGrid high_pass(const FrequencyGrid& grid, double cutoff) {
    if (std::isnan(cutoff) || cutoff < 0.0) {
        throw ValueError("high_pass: cutoff must be >= 0");
    }
    FrequencyGrid out = grid;
    for (int u = 0; u < grid.height(); ++u) {
        const double fu = FrequencyGrid::signed_freq(u, grid.height());
        for (int v = 0; v < grid.width(); ++v) {
            const double fv = FrequencyGrid::signed_freq(v, grid.width());
            const double radius = std::sqrt(fu * fu + fv * fv);
            if (!(radius > cutoff)) {
                for (int c = 0; c < grid.channels(); ++c) out.at(u, v, c) = cd{};
            }
        }
    }
    return out;
}

double resolve_cutoff(const FrequencyGrid& grid, const HighPassSpec& spec) {
    spec.validate();
    if (spec.mode == HighPassSpec::Mode::kFixed) {
        return spec.omega_c;
    }
    // Group energies by exact integer squared radius so ties accumulate as
    // one shell.
    std::map<std::int64_t, double> shells;
    for (int u = 0; u < grid.height(); ++u) {
        const std::int64_t fu = FrequencyGrid::signed_freq(u, grid.height());
        for (int v = 0; v < grid.width(); ++v) {
            const std::int64_t fv = FrequencyGrid::signed_freq(v, grid.width());
            double e = 0.0;
            for (int c = 0; c < grid.channels(); ++c) e += std::norm(grid.at(u, v, c));
            shells[fu * fu + fv * fv] += e;
        }
    }
    double total = 0.0;
    for (const auto& [r2, e] : shells) total += e;
    if (total <= 0.0) return 0.0;

    double cum = 0.0;
    for (const auto& [r2, e] : shells) {
        cum += e;
        if (cum >= spec.energy_fraction * total) {
            return std::sqrt(static_cast<double>(r2));
        }
    }
    const auto last = std::prev(shells.end());
    return std::sqrt(static_cast<double>(last->first));
}

} // namespace veilforge
