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
#include <variant>
#include <vector>

#include "veilforge/rng.hpp"

namespace veilforge::nn {

// Activation buffer: H x W x C, row-major, channel-interleaved. Unlike
// ImageTensor this carries arbitrary channel counts and signed values.
struct Volume {
    int h = 0, w = 0, c = 0;
    std::vector<double> v;

    Volume() = default;
    Volume(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(static_cast<std::size_t>(h_) * w_ * c_, 0.0) {}

    double& at(int y, int x, int ch) noexcept {
        return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
    }
    const double& at(int y, int x, int ch) const noexcept {
        return v[(static_cast<std::size_t>(y) * w + x) * c + ch];
    }
    std::size_t size() const noexcept { return v.size(); }
};

// Parameter block with its gradient accumulator.
struct Param {
    std::vector<double> value;
    std::vector<double> grad;

    void resize(std::size_t n) {
        value.assign(n, 0.0);
        grad.assign(n, 0.0);
    }
    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

// 3x3 convolution, zero padding 1, stride 1 or 2. Weight layout is
// [out][ky][kx][in] so the innermost loop runs over contiguous input
// channels.
struct Conv2d {
    int in_ch = 0, out_ch = 0, stride = 1;
    Param weight; // out_ch * 3 * 3 * in_ch
    Param bias;   // out_ch

    Conv2d() = default;
    Conv2d(int in, int out, int stride, Rng& rng); // He fan-in init, zero bias

    Volume forward(const Volume& x) const;
    // Accumulates weight/bias gradients, returns dL/dx.
    Volume backward(const Volume& x, const Volume& dy);
    // Input gradient only; parameters untouched (optimization loops need no
    // weight gradients).
    Volume backward_input(const Volume& x, const Volume& dy) const;
};

struct Dense {
    int in = 0, out = 0;
    Param weight; // out * in
    Param bias;   // out

    Dense() = default;
    Dense(int in, int out, Rng& rng);

    Volume forward(const Volume& x) const; // flattens input, emits 1x1xout
    Volume backward(const Volume& x, const Volume& dy);
    Volume backward_input(const Volume& x, const Volume& dy) const;
};

struct ReLU {
    Volume forward(const Volume& x) const;
    Volume backward(const Volume& x, const Volume& dy) const;
};

struct GlobalAvgPool {
    Volume forward(const Volume& x) const; // 1x1xC
    Volume backward(const Volume& x, const Volume& dy) const;
};

// Unit-normalizes a 1x1xC vector. A vanishing pre-normalization activation
// (norm < 1e-12) maps to the fixed fallback e1 with zero gradient.
struct L2Normalize {
    Volume forward(const Volume& x) const;
    Volume backward(const Volume& x, const Volume& dy) const;
};

// Nearest-neighbour 2x upsampling.
struct Upsample2x {
    Volume forward(const Volume& x) const;
    Volume backward(const Volume& x, const Volume& dy) const;
};

Volume concat_channels(const Volume& a, const Volume& b);
// Splits dL/d(concat(a,b)) back into the two operands' gradients.
std::pair<Volume, Volume> split_channels(const Volume& dy, int ca, int cb);

using Layer = std::variant<Conv2d, Dense, ReLU, GlobalAvgPool, L2Normalize>;

// Sequential net helpers. `trace`, when given, records the input of every
// layer (acts[i] feeds layer i; acts.back() is the output).
Volume forward(const std::vector<Layer>& layers, const Volume& x,
               std::vector<Volume>* trace = nullptr);
// Backprop through the recorded trace; accumulates parameter gradients and
// returns dL/d(input).
Volume backward(std::vector<Layer>& layers, const std::vector<Volume>& trace,
                const Volume& dout);

// Backprop that only propagates to the input, leaving parameters const.
Volume backward_input(const std::vector<Layer>& layers, const std::vector<Volume>& trace,
                      const Volume& dout);

std::vector<Param*> parameters(std::vector<Layer>& layers);
std::size_t parameter_count(const std::vector<Layer>& layers);
void zero_grads(std::vector<Param*>& params);

// Standard Adam with bias correction.
struct Adam {
    double lr = 1e-4;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    void attach(const std::vector<Param*>& params);
    void step(const std::vector<Param*>& params);

private:
    std::vector<std::vector<double>> m_, v_;
    std::int64_t t_ = 0;
};

} // namespace veilforge::nn
