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

#include "veilforge/nn/layers.hpp"

#include <cmath>

#include "veilforge/errors.hpp"

namespace veilforge::nn {

namespace {

inline int conv_out_extent(int in, int stride) {
    // kernel 3, padding 1
    return (in - 1) / stride + 1;
}

} // namespace

Conv2d::Conv2d(int in, int out, int stride_, Rng& rng)
    : in_ch(in), out_ch(out), stride(stride_) {
    if (in < 1 || out < 1 || (stride_ != 1 && stride_ != 2)) {
        throw ValueError("Conv2d: bad configuration");
    }
    weight.resize(static_cast<std::size_t>(out) * 9 * in);
    bias.resize(static_cast<std::size_t>(out));
    const double std = std::sqrt(2.0 / (9.0 * in));
    for (double& w : weight.value) w = rng.normal(0.0, std);
}

Volume Conv2d::forward(const Volume& x) const {
    const int ho = conv_out_extent(x.h, stride);
    const int wo = conv_out_extent(x.w, stride);
    Volume y(ho, wo, out_ch);
    for (int oy = 0; oy < ho; ++oy) {
        for (int ox = 0; ox < wo; ++ox) {
            double* yp = &y.at(oy, ox, 0);
            for (int oc = 0; oc < out_ch; ++oc) yp[oc] = bias.value[oc];
            for (int ky = 0; ky < 3; ++ky) {
                const int yy = oy * stride - 1 + ky;
                if (yy < 0 || yy >= x.h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int xx = ox * stride - 1 + kx;
                    if (xx < 0 || xx >= x.w) continue;
                    const double* xp = &x.at(yy, xx, 0);
                    for (int oc = 0; oc < out_ch; ++oc) {
                        const double* wp = &weight.value[(static_cast<std::size_t>(oc) * 9 + ky * 3 + kx) * in_ch];
                        double acc = 0.0;
                        for (int ic = 0; ic < in_ch; ++ic) acc += wp[ic] * xp[ic];
                        yp[oc] += acc;
                    }
                }
            }
        }
    }
    return y;
}

Volume Conv2d::backward(const Volume& x, const Volume& dy) {
    Volume dx(x.h, x.w, x.c);
    for (int oy = 0; oy < dy.h; ++oy) {
        for (int ox = 0; ox < dy.w; ++ox) {
            const double* dyp = &dy.at(oy, ox, 0);
            for (int oc = 0; oc < out_ch; ++oc) bias.grad[oc] += dyp[oc];
            for (int ky = 0; ky < 3; ++ky) {
                const int yy = oy * stride - 1 + ky;
                if (yy < 0 || yy >= x.h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int xx = ox * stride - 1 + kx;
                    if (xx < 0 || xx >= x.w) continue;
                    const double* xp = &x.at(yy, xx, 0);
                    double* dxp = &dx.at(yy, xx, 0);
                    for (int oc = 0; oc < out_ch; ++oc) {
                        const double g = dyp[oc];
                        const std::size_t wbase = (static_cast<std::size_t>(oc) * 9 + ky * 3 + kx) * in_ch;
                        const double* wp = &weight.value[wbase];
                        double* wg = &weight.grad[wbase];
                        for (int ic = 0; ic < in_ch; ++ic) {
                            wg[ic] += g * xp[ic];
                            dxp[ic] += g * wp[ic];
                        }
                    }
                }
            }
        }
    }
    return dx;
}

Volume Conv2d::backward_input(const Volume& x, const Volume& dy) const {
    Volume dx(x.h, x.w, x.c);
    for (int oy = 0; oy < dy.h; ++oy) {
        for (int ox = 0; ox < dy.w; ++ox) {
            const double* dyp = &dy.at(oy, ox, 0);
            for (int ky = 0; ky < 3; ++ky) {
                const int yy = oy * stride - 1 + ky;
                if (yy < 0 || yy >= x.h) continue;
                for (int kx = 0; kx < 3; ++kx) {
                    const int xx = ox * stride - 1 + kx;
                    if (xx < 0 || xx >= x.w) continue;
                    double* dxp = &dx.at(yy, xx, 0);
                    for (int oc = 0; oc < out_ch; ++oc) {
                        const double g = dyp[oc];
                        const double* wp = &weight.value[(static_cast<std::size_t>(oc) * 9 + ky * 3 + kx) * in_ch];
                        for (int ic = 0; ic < in_ch; ++ic) dxp[ic] += g * wp[ic];
                    }
                }
            }
        }
    }
    return dx;
}

Dense::Dense(int in_, int out_, Rng& rng) : in(in_), out(out_) {
    if (in_ < 1 || out_ < 1) throw ValueError("Dense: bad configuration");
    weight.resize(static_cast<std::size_t>(out_) * in_);
    bias.resize(static_cast<std::size_t>(out_));
    const double std = std::sqrt(2.0 / in_);
    for (double& w : weight.value) w = rng.normal(0.0, std);
}

Volume Dense::forward(const Volume& x) const {
    if (static_cast<int>(x.size()) != in) throw ValueError("Dense: input size mismatch");
    Volume y(1, 1, out);
    for (int o = 0; o < out; ++o) {
        const double* wp = &weight.value[static_cast<std::size_t>(o) * in];
        double acc = bias.value[o];
        for (int i = 0; i < in; ++i) acc += wp[i] * x.v[i];
        y.v[o] = acc;
    }
    return y;
}

Volume Dense::backward(const Volume& x, const Volume& dy) {
    Volume dx(x.h, x.w, x.c);
    for (int o = 0; o < out; ++o) {
        const double g = dy.v[o];
        bias.grad[o] += g;
        const std::size_t wbase = static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) {
            weight.grad[wbase + i] += g * x.v[i];
            dx.v[i] += g * weight.value[wbase + i];
        }
    }
    return dx;
}

Volume Dense::backward_input(const Volume& x, const Volume& dy) const {
    Volume dx(x.h, x.w, x.c);
    for (int o = 0; o < out; ++o) {
        const double g = dy.v[o];
        const std::size_t wbase = static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) dx.v[i] += g * weight.value[wbase + i];
    }
    return dx;
}

Volume ReLU::forward(const Volume& x) const {
    Volume y = x;
    for (double& v : y.v) v = v > 0.0 ? v : 0.0;
    return y;
}

Volume ReLU::backward(const Volume& x, const Volume& dy) const {
    Volume dx = dy;
    for (std::size_t i = 0; i < dx.v.size(); ++i) {
        if (x.v[i] <= 0.0) dx.v[i] = 0.0;
    }
    return dx;
}

Volume GlobalAvgPool::forward(const Volume& x) const {
    Volume y(1, 1, x.c);
    const double inv = 1.0 / (static_cast<double>(x.h) * x.w);
    for (int yy = 0; yy < x.h; ++yy) {
        for (int xx = 0; xx < x.w; ++xx) {
            const double* xp = &x.at(yy, xx, 0);
            for (int c = 0; c < x.c; ++c) y.v[c] += xp[c] * inv;
        }
    }
    return y;
}

Volume GlobalAvgPool::backward(const Volume& x, const Volume& dy) const {
    Volume dx(x.h, x.w, x.c);
    const double inv = 1.0 / (static_cast<double>(x.h) * x.w);
    for (int yy = 0; yy < x.h; ++yy) {
        for (int xx = 0; xx < x.w; ++xx) {
            double* dxp = &dx.at(yy, xx, 0);
            for (int c = 0; c < x.c; ++c) dxp[c] = dy.v[c] * inv;
        }
    }
    return dx;
}

Volume L2Normalize::forward(const Volume& x) const {
    double norm2 = 0.0;
    for (double v : x.v) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    Volume y = x;
    if (norm < 1e-12) {
        std::fill(y.v.begin(), y.v.end(), 0.0);
        y.v[0] = 1.0;
        return y;
    }
    for (double& v : y.v) v /= norm;
    return y;
}

Volume L2Normalize::backward(const Volume& x, const Volume& dy) const {
    double norm2 = 0.0;
    for (double v : x.v) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    Volume dx(x.h, x.w, x.c);
    if (norm < 1e-12) return dx; // fallback branch is constant
    double dot = 0.0;
    for (std::size_t i = 0; i < x.v.size(); ++i) dot += x.v[i] * dy.v[i];
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        dx.v[i] = dy.v[i] / norm - x.v[i] * dot / (norm2 * norm);
    }
    return dx;
}

Volume Upsample2x::forward(const Volume& x) const {
    Volume y(x.h * 2, x.w * 2, x.c);
    for (int yy = 0; yy < y.h; ++yy) {
        const int sy = yy / 2;
        for (int xx = 0; xx < y.w; ++xx) {
            const double* xp = &x.at(sy, xx / 2, 0);
            double* yp = &y.at(yy, xx, 0);
            for (int c = 0; c < x.c; ++c) yp[c] = xp[c];
        }
    }
    return y;
}

Volume Upsample2x::backward(const Volume& x, const Volume& dy) const {
    Volume dx(x.h, x.w, x.c);
    for (int yy = 0; yy < dy.h; ++yy) {
        const int sy = yy / 2;
        for (int xx = 0; xx < dy.w; ++xx) {
            const double* dyp = &dy.at(yy, xx, 0);
            double* dxp = &dx.at(sy, xx / 2, 0);
            for (int c = 0; c < x.c; ++c) dxp[c] += dyp[c];
        }
    }
    return dx;
}

Volume concat_channels(const Volume& a, const Volume& b) {
    if (a.h != b.h || a.w != b.w) throw ValueError("concat_channels: spatial mismatch");
    Volume y(a.h, a.w, a.c + b.c);
    for (int yy = 0; yy < a.h; ++yy) {
        for (int xx = 0; xx < a.w; ++xx) {
            double* yp = &y.at(yy, xx, 0);
            const double* ap = &a.at(yy, xx, 0);
            const double* bp = &b.at(yy, xx, 0);
            for (int c = 0; c < a.c; ++c) yp[c] = ap[c];
            for (int c = 0; c < b.c; ++c) yp[a.c + c] = bp[c];
        }
    }
    return y;
}

std::pair<Volume, Volume> split_channels(const Volume& dy, int ca, int cb) {
    if (dy.c != ca + cb) throw ValueError("split_channels: channel mismatch");
    Volume da(dy.h, dy.w, ca);
    Volume db(dy.h, dy.w, cb);
    for (int yy = 0; yy < dy.h; ++yy) {
        for (int xx = 0; xx < dy.w; ++xx) {
            const double* dyp = &dy.at(yy, xx, 0);
            double* dap = &da.at(yy, xx, 0);
            double* dbp = &db.at(yy, xx, 0);
            for (int c = 0; c < ca; ++c) dap[c] = dyp[c];
            for (int c = 0; c < cb; ++c) dbp[c] = dyp[ca + c];
        }
    }
    return {std::move(da), std::move(db)};
}

Volume forward(const std::vector<Layer>& layers, const Volume& x, std::vector<Volume>* trace) {
    Volume cur = x;
    if (trace) {
        trace->clear();
        trace->push_back(cur);
    }
    for (const auto& layer : layers) {
        cur = std::visit([&](const auto& l) { return l.forward(cur); }, layer);
        if (trace) trace->push_back(cur);
    }
    return cur;
}

Volume backward(std::vector<Layer>& layers, const std::vector<Volume>& trace, const Volume& dout) {
    if (trace.size() != layers.size() + 1) {
        throw ValueError("backward: trace does not match layer stack");
    }
    Volume grad = dout;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const Volume& input = trace[i];
        grad = std::visit([&](auto& l) { return l.backward(input, grad); }, layers[i]);
    }
    return grad;
}

Volume backward_input(const std::vector<Layer>& layers, const std::vector<Volume>& trace,
                      const Volume& dout) {
    if (trace.size() != layers.size() + 1) {
        throw ValueError("backward_input: trace does not match layer stack");
    }
    Volume grad = dout;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const Volume& input = trace[i];
        grad = std::visit([&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Conv2d> || std::is_same_v<T, Dense>) {
                return l.backward_input(input, grad);
            } else {
                return l.backward(input, grad);
            }
        }, layers[i]);
    }
    return grad;
}

std::vector<Param*> parameters(std::vector<Layer>& layers) {
    std::vector<Param*> out;
    for (auto& layer : layers) {
        std::visit([&](auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Conv2d> || std::is_same_v<T, Dense>) {
                out.push_back(&l.weight);
                out.push_back(&l.bias);
            }
        }, layer);
    }
    return out;
}

std::size_t parameter_count(const std::vector<Layer>& layers) {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        std::visit([&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, Conv2d> || std::is_same_v<T, Dense>) {
                n += l.weight.value.size() + l.bias.value.size();
            }
        }, layer);
    }
    return n;
}

void zero_grads(std::vector<Param*>& params) {
    for (Param* p : params) p->zero_grad();
}

void Adam::attach(const std::vector<Param*>& params) {
    m_.clear();
    v_.clear();
    for (const Param* p : params) {
        m_.emplace_back(p->value.size(), 0.0);
        v_.emplace_back(p->value.size(), 0.0);
    }
    t_ = 0;
}

void Adam::step(const std::vector<Param*>& params) {
    if (m_.size() != params.size()) attach(params);
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = *params[i];
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < p.value.size(); ++j) {
            const double g = p.grad[j];
            m[j] = beta1 * m[j] + (1.0 - beta1) * g;
            v[j] = beta2 * v[j] + (1.0 - beta2) * g * g;
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p.value[j] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

} // namespace veilforge::nn
