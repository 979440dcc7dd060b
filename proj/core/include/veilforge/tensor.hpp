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

#include <cstddef>
#include <span>
#include <vector>

namespace veilforge {

// Dense H x W (x C) image container. Row-major, channel-interleaved, double
// precision. Values are unconstrained reals (gradients live here too); the
// [0,1] pixel range is established explicitly via clamp01. NaN is never a
// value: ops that could surface one raise NumericError instead.
class ImageTensor {
public:
    ImageTensor() = default;
    ImageTensor(int height, int width, int channels);

    static ImageTensor filled(int height, int width, int channels, double value);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(int y, int x, int c = 0) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    double at(int y, int x, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const ImageTensor& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

// Throws NumericError if any entry is NaN or infinite.
void validate_finite(const ImageTensor& img, const char* context);

// Clamp every entry to [0,1]. NaN input is rejected, not clamped.
ImageTensor clamp01(const ImageTensor& img);

ImageTensor operator+(const ImageTensor& a, const ImageTensor& b);
ImageTensor operator-(const ImageTensor& a, const ImageTensor& b);
ImageTensor operator*(const ImageTensor& a, double s);
ImageTensor hadamard(const ImageTensor& a, const ImageTensor& b);

double sum(const ImageTensor& img);
double mean(const ImageTensor& img);
double min_value(const ImageTensor& img);
double max_value(const ImageTensor& img);
double mean_abs(const ImageTensor& img);
double max_abs(const ImageTensor& img);

// Per-pixel mean over channels; identity copy for single-channel input.
ImageTensor luminance(const ImageTensor& img);

// Affine map of the full tensor onto [0,1]. Zero dynamic range maps to 0.5.
ImageTensor rescale_minmax(const ImageTensor& img);

// Box blur with clamp-to-edge borders; window must be odd.
ImageTensor box_blur(const ImageTensor& img, int window);

ImageTensor flip_horizontal(const ImageTensor& img);

} // namespace veilforge
