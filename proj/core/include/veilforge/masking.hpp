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
#include <string>
#include <utility>
#include <vector>

#include "veilforge/rng.hpp"
#include "veilforge/tensor.hpp"

namespace veilforge {

// Per-pixel keep/prune decision. keep = true preserves the pixel; false
// marks it for stochastic fill.
class RegionMask {
public:
    RegionMask() = default;
    RegionMask(int height, int width);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }

    bool keep(int y, int x) const noexcept { return keep_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    void set_keep(int y, int x, bool v) noexcept { keep_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

    std::size_t kept_count() const noexcept;
    // All-keep or all-prune masks make the pipeline a no-op on one side;
    // callers should warn.
    bool is_degenerate() const noexcept;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> keep_;
};

struct PaddingSpec {
    double kappa = 1.5; // std scale
    int window = 9;     // local-statistics window side, odd
    void validate() const;
};

// Keeps exactly ceil(keep_fraction * H * W) pixels with the highest Sobel
// gradient magnitude (computed on the luminance, clamp-to-edge borders).
// Ties break toward the lower row-major index.
RegionMask detail_mask(const ImageTensor& img, double keep_fraction);

// Explicit rectangle alternative: pixels inside any rectangle are kept.
// Rectangles are {y0, x0, height, width}, clipped to the image.
struct MaskRect {
    int y0 = 0, x0 = 0, height = 0, width = 0;
};
RegionMask rect_mask(int height, int width, const std::vector<MaskRect>& rects);

// Per-pixel mean and population standard deviation over a window x window
// neighborhood with clamp-to-edge replication. Returns {mean map, std map}.
std::pair<ImageTensor, ImageTensor> local_stats(const ImageTensor& img, int window);

// Kept pixels copy through verbatim; each pruned pixel is replaced by one
// clamped draw from Normal(mu, sigma * kappa), where mu and sigma are the
// local statistics of stats_source. Draw order is fixed per (row, column,
// channel) via per-row substreams, so a pixel's fill value depends only on
// the seed and its own index.
ImageTensor stochastic_fill(const ImageTensor& img, const ImageTensor& stats_source,
                            const RegionMask& mask, const PaddingSpec& spec, const Rng& rng);

// Same, with the image itself as the statistics source.
ImageTensor stochastic_fill(const ImageTensor& img, const RegionMask& mask,
                            const PaddingSpec& spec, const Rng& rng);

// Mask exchange format: binary PGM with maxval 1 (1 = keep).
RegionMask load_mask_pgm(const std::string& path);
void save_mask_pgm(const std::string& path, const RegionMask& mask);

} // namespace veilforge
