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

#include "veilforge/masking.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "veilforge/errors.hpp"

namespace veilforge {

RegionMask::RegionMask(int height, int width) : height_(height), width_(width) {
    if (height < 1 || width < 1) throw ValueError("RegionMask: dimensions must be >= 1");
    keep_.assign(static_cast<std::size_t>(height) * width, 0);
}

std::size_t RegionMask::kept_count() const noexcept {
    return static_cast<std::size_t>(std::count(keep_.begin(), keep_.end(), std::uint8_t{1}));
}

bool RegionMask::is_degenerate() const noexcept {
    const std::size_t k = kept_count();
    return k == 0 || k == keep_.size();
}

void PaddingSpec::validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) {
        throw ValueError("PaddingSpec: kappa must be finite and > 0");
    }
    if (window < 3 || window % 2 == 0) {
        throw ValueError("PaddingSpec: window must be odd and >= 3");
    }
}

RegionMask detail_mask(const ImageTensor& img, double keep_fraction) {
    if (!(keep_fraction > 0.0 && keep_fraction < 1.0)) {
        throw ValueError("detail_mask: keep_fraction must lie in (0,1)");
    }
    validate_finite(img, "detail_mask");
    const ImageTensor lum = luminance(img);
    const int h = img.height();
    const int w = img.width();

    // Sobel gradient magnitude, clamp-to-edge.
    std::vector<double> energy(static_cast<std::size_t>(h) * w);
    auto px = [&](int y, int x) {
        return lum.at(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = -px(y - 1, x - 1) + px(y - 1, x + 1)
                              - 2.0 * px(y, x - 1) + 2.0 * px(y, x + 1)
                              - px(y + 1, x - 1) + px(y + 1, x + 1);
            const double gy = -px(y - 1, x - 1) - 2.0 * px(y - 1, x) - px(y - 1, x + 1)
                              + px(y + 1, x - 1) + 2.0 * px(y + 1, x) + px(y + 1, x + 1);
            energy[static_cast<std::size_t>(y) * w + x] = std::sqrt(gx * gx + gy * gy);
        }
    }

    const std::size_t total = energy.size();
    const auto k = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(total)));
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (energy[a] != energy[b]) return energy[a] > energy[b];
        return a < b;
    });

    RegionMask mask(h, w);
    for (std::size_t i = 0; i < k && i < total; ++i) {
        const auto idx = order[i];
        mask.set_keep(static_cast<int>(idx / w), static_cast<int>(idx % w), true);
    }
    return mask;
}

RegionMask rect_mask(int height, int width, const std::vector<MaskRect>& rects) {
    RegionMask mask(height, width);
    for (const auto& r : rects) {
        const int y1 = std::clamp(r.y0 + r.height, 0, height);
        const int x1 = std::clamp(r.x0 + r.width, 0, width);
        for (int y = std::clamp(r.y0, 0, height); y < y1; ++y) {
            for (int x = std::clamp(r.x0, 0, width); x < x1; ++x) {
                mask.set_keep(y, x, true);
            }
        }
    }
    return mask;
}

std::pair<ImageTensor, ImageTensor> local_stats(const ImageTensor& img, int window) {
    if (window < 3 || window % 2 == 0) {
        throw ValueError("local_stats: window must be odd and >= 3");
    }
    validate_finite(img, "local_stats");
    const int h = img.height();
    const int w = img.width();
    const int r = window / 2;
    const int ph = h + 2 * r;
    const int pw = w + 2 * r;
    const double n = static_cast<double>(window) * window;

    ImageTensor mean_map(h, w, img.channels());
    ImageTensor std_map(h, w, img.channels());

    // Summed-area tables over the edge-replicated padding, per channel.
    std::vector<double> s1(static_cast<std::size_t>(ph + 1) * (pw + 1));
    std::vector<double> s2(s1.size());
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < ph; ++y) {
            const int sy = std::clamp(y - r, 0, h - 1);
            for (int x = 0; x < pw; ++x) {
                const int sx = std::clamp(x - r, 0, w - 1);
                const double v = img.at(sy, sx, c);
                const std::size_t i = static_cast<std::size_t>(y + 1) * (pw + 1) + (x + 1);
                const std::size_t up = i - (pw + 1);
                s1[i] = v + s1[i - 1] + s1[up] - s1[up - 1];
                s2[i] = v * v + s2[i - 1] + s2[up] - s2[up - 1];
            }
        }
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                // Window [y, y+window) x [x, x+window) in padded coordinates.
                const std::size_t a = static_cast<std::size_t>(y) * (pw + 1) + x;
                const std::size_t b = a + window;
                const std::size_t crow = a + static_cast<std::size_t>(window) * (pw + 1);
                const std::size_t d = crow + window;
                const double sum1 = s1[d] - s1[b] - s1[crow] + s1[a];
                const double sum2 = s2[d] - s2[b] - s2[crow] + s2[a];
                const double m = sum1 / n;
                double var = std::max(0.0, sum2 / n - m * m);
                // summed-area cancellation noise; constant windows must give
                // an exact zero sigma
                if (var <= 1e-12) var = 0.0;
                mean_map.at(y, x, c) = m;
                std_map.at(y, x, c) = std::sqrt(var);
            }
        }
    }
    return {std::move(mean_map), std::move(std_map)};
}

ImageTensor stochastic_fill(const ImageTensor& img, const ImageTensor& stats_source,
                            const RegionMask& mask, const PaddingSpec& spec, const Rng& rng) {
    spec.validate();
    if (mask.height() != img.height() || mask.width() != img.width()) {
        throw ValueError("stochastic_fill: mask dimensions do not match image");
    }
    if (!stats_source.same_shape(img)) {
        throw ValueError("stochastic_fill: stats source shape does not match image");
    }
    validate_finite(img, "stochastic_fill");

    const auto [mean_map, std_map] = local_stats(stats_source, spec.window);
    ImageTensor out = img;
    for (int y = 0; y < img.height(); ++y) {
        Rng row_rng = rng.substream("fill", static_cast<std::uint64_t>(y));
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                // One draw per (pixel, channel) whether pruned or not keeps
                // fill values a function of the pixel index alone.
                const double draw = row_rng.normal(mean_map.at(y, x, c),
                                                   std_map.at(y, x, c) * spec.kappa);
                if (!mask.keep(y, x)) {
                    out.at(y, x, c) = std::clamp(draw, 0.0, 1.0);
                }
            }
        }
    }
    return out;
}

ImageTensor stochastic_fill(const ImageTensor& img, const RegionMask& mask,
                            const PaddingSpec& spec, const Rng& rng) {
    return stochastic_fill(img, img, mask, spec, rng);
}

RegionMask load_mask_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string magic;
    in >> magic;
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    in.get();
    if (magic != "P5" || maxval != 1 || w < 1 || h < 1) {
        throw IoError(path + ": expected binary PGM with maxval 1");
    }
    std::vector<char> bytes(static_cast<std::size_t>(w) * h);
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!in) throw IoError(path + ": truncated mask raster");
    RegionMask mask(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            mask.set_keep(y, x, bytes[static_cast<std::size_t>(y) * w + x] != 0);
        }
    }
    return mask;
}

void save_mask_pgm(const std::string& path, const RegionMask& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "P5\n" << mask.width() << " " << mask.height() << "\n1\n";
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            out.put(mask.keep(y, x) ? 1 : 0);
        }
    }
}

} // namespace veilforge
