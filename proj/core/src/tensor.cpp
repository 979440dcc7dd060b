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

#include "veilforge/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "veilforge/errors.hpp"

namespace veilforge {

ImageTensor::ImageTensor(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
    if (height < 1 || width < 1) {
        throw ValueError("ImageTensor: height and width must be >= 1");
    }
    if (channels != 1 && channels != 3) {
        throw ValueError("ImageTensor: channel count must be 1 or 3, got " +
                         std::to_string(channels));
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0);
}

ImageTensor ImageTensor::filled(int height, int width, int channels, double value) {
    ImageTensor t(height, width, channels);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

void validate_finite(const ImageTensor& img, const char* context) {
    for (double v : img.data()) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(context) + ": non-finite value encountered");
        }
    }
}

ImageTensor clamp01(const ImageTensor& img) {
    validate_finite(img, "clamp01");
    ImageTensor out = img;
    for (double& v : out.data()) {
        v = std::clamp(v, 0.0, 1.0);
    }
    return out;
}

namespace {

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ValueError(std::string(op) + ": shape mismatch");
    }
}

} // namespace

ImageTensor operator+(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "operator+");
    ImageTensor out = a;
    auto d = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += bd[i];
    return out;
}

ImageTensor operator-(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "operator-");
    ImageTensor out = a;
    auto d = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= bd[i];
    return out;
}

ImageTensor operator*(const ImageTensor& a, double s) {
    ImageTensor out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

ImageTensor hadamard(const ImageTensor& a, const ImageTensor& b) {
    require_same_shape(a, b, "hadamard");
    ImageTensor out = a;
    auto d = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= bd[i];
    return out;
}

double sum(const ImageTensor& img) {
    double acc = 0.0;
    for (double v : img.data()) acc += v;
    return acc;
}

double mean(const ImageTensor& img) {
    return img.size() == 0 ? 0.0 : sum(img) / static_cast<double>(img.size());
}

double min_value(const ImageTensor& img) {
    double m = std::numeric_limits<double>::infinity();
    for (double v : img.data()) m = std::min(m, v);
    return m;
}

double max_value(const ImageTensor& img) {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : img.data()) m = std::max(m, v);
    return m;
}

double mean_abs(const ImageTensor& img) {
    double acc = 0.0;
    for (double v : img.data()) acc += std::abs(v);
    return img.size() == 0 ? 0.0 : acc / static_cast<double>(img.size());
}

double max_abs(const ImageTensor& img) {
    double m = 0.0;
    for (double v : img.data()) m = std::max(m, std::abs(v));
    return m;
}

ImageTensor luminance(const ImageTensor& img) {
    if (img.channels() == 1) return img;
    ImageTensor out(img.height(), img.width(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int c = 0; c < img.channels(); ++c) acc += img.at(y, x, c);
            out.at(y, x) = acc / img.channels();
        }
    }
    return out;
}

ImageTensor rescale_minmax(const ImageTensor& img) {
    validate_finite(img, "rescale_minmax");
    const double lo = min_value(img);
    const double hi = max_value(img);
    // Dynamic range at rounding-noise scale counts as zero; otherwise a
    // nominally constant input would blow residue up to full range.
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (hi - lo <= slack) {
        return ImageTensor::filled(img.height(), img.width(), img.channels(), 0.5);
    }
    ImageTensor out = img;
    const double inv = 1.0 / (hi - lo);
    for (double& v : out.data()) v = (v - lo) * inv;
    return out;
}

ImageTensor box_blur(const ImageTensor& img, int window) {
    if (window < 1 || window % 2 == 0) {
        throw ValueError("box_blur: window must be odd and >= 1");
    }
    const int r = window / 2;
    ImageTensor out(img.height(), img.width(), img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                double acc = 0.0;
                for (int dy = -r; dy <= r; ++dy) {
                    const int yy = std::clamp(y + dy, 0, img.height() - 1);
                    for (int dx = -r; dx <= r; ++dx) {
                        const int xx = std::clamp(x + dx, 0, img.width() - 1);
                        acc += img.at(yy, xx, c);
                    }
                }
                out.at(y, x, c) = acc / (static_cast<double>(window) * window);
            }
        }
    }
    return out;
}

ImageTensor flip_horizontal(const ImageTensor& img) {
    ImageTensor out(img.height(), img.width(), img.channels());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            for (int c = 0; c < img.channels(); ++c) {
                out.at(y, x, c) = img.at(y, img.width() - 1 - x, c);
            }
        }
    }
    return out;
}

} // namespace veilforge
