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

#include "veilforge/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

constexpr int kRadius = 5; // 11x11 window
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01, kK2 = 0.03, kL = 1.0;

const std::array<double, 11>& gaussian_taps() {
    static const std::array<double, 11> taps = [] {
        std::array<double, 11> t{};
        double s = 0.0;
        for (int k = -kRadius; k <= kRadius; ++k) {
            t[k + kRadius] = std::exp(-(k * k) / (2.0 * kSigma * kSigma));
            s += t[k + kRadius];
        }
        for (double& v : t) v /= s;
        return t;
    }();
    return taps;
}

// Mirror index including the edge sample: -1 -> 0, -2 -> 1, n -> n-1.
inline int reflect(int i, int n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
    return i;
}

// Separable Gaussian filter of one channel plane with reflected borders.
std::vector<double> gauss_filter(const std::vector<double>& src, int h, int w) {
    const auto& taps = gaussian_taps();
    std::vector<double> tmp(src.size()), dst(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -kRadius; k <= kRadius; ++k) {
                acc += taps[k + kRadius] * src[static_cast<std::size_t>(y) * w + reflect(x + k, w)];
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -kRadius; k <= kRadius; ++k) {
                acc += taps[k + kRadius] * tmp[static_cast<std::size_t>(reflect(y + k, h)) * w + x];
            }
            dst[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return dst;
}

} // namespace

double ssim(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b)) throw ValueError("ssim: image shapes differ");
    validate_finite(a, "ssim");
    validate_finite(b, "ssim");

    const int h = a.height();
    const int w = a.width();
    const double c1 = (kK1 * kL) * (kK1 * kL);
    const double c2 = (kK2 * kL) * (kK2 * kL);

    double total = 0.0;
    std::vector<double> pa(static_cast<std::size_t>(h) * w), pb(pa.size());
    std::vector<double> paa(pa.size()), pbb(pa.size()), pab(pa.size());
    for (int c = 0; c < a.channels(); ++c) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                pa[i] = a.at(y, x, c);
                pb[i] = b.at(y, x, c);
                paa[i] = pa[i] * pa[i];
                pbb[i] = pb[i] * pb[i];
                pab[i] = pa[i] * pb[i];
            }
        }
        const auto mu_a = gauss_filter(pa, h, w);
        const auto mu_b = gauss_filter(pb, h, w);
        const auto m_aa = gauss_filter(paa, h, w);
        const auto m_bb = gauss_filter(pbb, h, w);
        const auto m_ab = gauss_filter(pab, h, w);

        double acc = 0.0;
        for (std::size_t i = 0; i < mu_a.size(); ++i) {
            const double va = m_aa[i] - mu_a[i] * mu_a[i];
            const double vb = m_bb[i] - mu_b[i] * mu_b[i];
            const double cov = m_ab[i] - mu_a[i] * mu_b[i];
            const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
            const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
            acc += num / den;
        }
        total += acc / static_cast<double>(mu_a.size());
    }
    return total / a.channels();
}

double psnr(const ImageTensor& a, const ImageTensor& b) {
    if (!a.same_shape(b)) throw ValueError("psnr: image shapes differ");
    validate_finite(a, "psnr");
    validate_finite(b, "psnr");
    double mse = 0.0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        mse += d * d;
    }
    mse /= static_cast<double>(da.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(kL * kL / mse);
}

MetricReport evaluate_pair(const ImageTensor& reference, const ImageTensor& test) {
    MetricReport r;
    r.ssim = ssim(reference, test);
    r.psnr = psnr(reference, test);
    return r;
}

} // namespace veilforge
