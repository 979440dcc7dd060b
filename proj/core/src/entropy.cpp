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

#include "veilforge/entropy.hpp"

#include <cmath>
#include <vector>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

void validate_range(const ImageTensor& img, const char* context) {
    for (double v : img.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValueError(std::string(context) + ": pixel outside [0,1]");
        }
    }
}

double log_divisor(const EntropySpec& spec) {
    return spec.log_base == EntropySpec::LogBase::kTwo ? std::log(2.0) : 1.0;
}

// Kernel window half-width in bins: wide enough that the truncated tail is
// below 1e-13, capped so the circular window never self-overlaps.
int kernel_radius(const EntropySpec& spec) {
    const int r = static_cast<int>(std::ceil(2.6 * spec.bandwidth * spec.bins));
    return std::clamp(r, 1, (spec.bins - 1) / 2);
}

struct SoftHistogram {
    std::vector<double> p;       // smoothed bin probabilities
    std::vector<double> kernel;  // per pixel: 2R+1 kernel values
    std::vector<double> norm;    // per pixel: kernel row sum
    std::vector<double> coord;   // per pixel: continuous bin coordinate
    std::vector<int> center;     // per pixel: window center bin
    int radius = 0;
};

SoftHistogram soft_histogram(const ImageTensor& img, const EntropySpec& spec) {
    const int bins = spec.bins;
    const int radius = kernel_radius(spec);
    const double delta = 1.0 / bins;
    const double sigma = spec.bandwidth / 8.0;
    const double expo = (delta * delta) / (2.0 * sigma * sigma);
    const auto n = static_cast<double>(img.size());

    SoftHistogram h;
    h.radius = radius;
    h.p.assign(bins, 0.0);
    h.kernel.resize(img.size() * (2 * radius + 1));
    h.norm.resize(img.size());
    h.coord.resize(img.size());
    h.center.resize(img.size());

    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double b = d[i] * bins - 0.5;
        const int jc = static_cast<int>(std::lround(b));
        double s = 0.0;
        double* row = &h.kernel[i * (2 * radius + 1)];
        for (int dj = -radius; dj <= radius; ++dj) {
            const double off = b - (jc + dj);
            const double k = std::exp(-off * off * expo);
            row[dj + radius] = k;
            s += k;
        }
        h.norm[i] = s;
        h.coord[i] = b;
        h.center[i] = jc;
        for (int dj = -radius; dj <= radius; ++dj) {
            const int j = ((jc + dj) % bins + bins) % bins;
            h.p[j] += row[dj + radius] / s / n;
        }
    }
    return h;
}

} // namespace

void EntropySpec::validate() const {
    if (bins < 2) throw ValueError("EntropySpec: bins must be >= 2");
    if (!(bandwidth > 0.0 && bandwidth < 1.0)) {
        throw ValueError("EntropySpec: bandwidth must lie in (0,1)");
    }
}

double hard_entropy(const ImageTensor& img, const EntropySpec& spec) {
    spec.validate();
    validate_range(img, "hard_entropy");
    std::vector<std::size_t> counts(spec.bins, 0);
    for (double v : img.data()) {
        const int bin = std::min(static_cast<int>(v * spec.bins), spec.bins - 1);
        ++counts[bin];
    }
    const auto n = static_cast<double>(img.size());
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h / log_divisor(spec);
}

double soft_entropy(const ImageTensor& img, const EntropySpec& spec) {
    spec.validate();
    validate_range(img, "soft_entropy");
    const SoftHistogram h = soft_histogram(img, spec);
    double entropy = 0.0;
    for (double p : h.p) {
        if (p > 0.0) entropy -= p * std::log(p);
    }
    return entropy / log_divisor(spec);
}

ImageTensor soft_entropy_grad(const ImageTensor& img, const EntropySpec& spec) {
    spec.validate();
    validate_range(img, "soft_entropy_grad");
    const SoftHistogram h = soft_histogram(img, spec);
    const int bins = spec.bins;
    const int radius = h.radius;
    const double delta = 1.0 / bins;
    const double sigma = spec.bandwidth / 8.0;
    // d/dv of the kernel exponent: kernel row offsets shift at bins per unit
    // intensity.
    const double dk_scale = -(delta / (sigma * sigma));
    const auto n = static_cast<double>(img.size());
    const double div = log_divisor(spec);

    // 1 + ln p per occupied bin; unoccupied bins cannot receive mass from an
    // infinitesimal move, so they contribute nothing.
    std::vector<double> dHdp(bins, 0.0);
    for (int j = 0; j < bins; ++j) {
        if (h.p[j] > 0.0) dHdp[j] = -(1.0 + std::log(h.p[j])) / div;
    }

    ImageTensor grad(img.height(), img.width(), img.channels());
    auto g = grad.data();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double* row = &h.kernel[i * (2 * radius + 1)];
        const double s = h.norm[i];
        const int jc = h.center[i];
        const double b = h.coord[i];

        double sprime = 0.0;
        for (int dj = -radius; dj <= radius; ++dj) {
            const double off = b - (jc + dj);
            sprime += row[dj + radius] * off * dk_scale;
        }
        double acc = 0.0;
        for (int dj = -radius; dj <= radius; ++dj) {
            const int j = ((jc + dj) % bins + bins) % bins;
            if (h.p[j] <= 0.0) continue;
            const double k = row[dj + radius];
            const double off = b - (jc + dj);
            const double kprime = k * off * dk_scale;
            acc += dHdp[j] * (kprime * s - k * sprime) / (s * s);
        }
        g[i] = acc / n;
    }
    return grad;
}

} // namespace veilforge
