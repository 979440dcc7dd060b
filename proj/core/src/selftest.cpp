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

#include "veilforge/selftest.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "veilforge/embedder.hpp"
#include "veilforge/entropy.hpp"
#include "veilforge/metrics.hpp"
#include "veilforge/recon.hpp"
#include "veilforge/rng.hpp"
#include "veilforge/spectral.hpp"
#include "veilforge/tensor.hpp"

namespace veilforge {

namespace {

ImageTensor random_image(Rng& rng, int h, int w, int c = 1) {
    ImageTensor img(h, w, c);
    for (double& v : img.data()) v = rng.uniform();
    return img;
}

std::string detail_line(double worst, double threshold) {
    std::ostringstream ss;
    ss << "worst " << worst << " (limit " << threshold << ")";
    return ss.str();
}

// For graded finite-difference checks: the worst (error - tolerance) margin,
// negative when everything passes.
std::string margin_line(double margin) {
    std::ostringstream ss;
    ss << "worst margin " << margin << " (pass <= 0)";
    return ss.str();
}

// ---- independent references ---------------------------------------------

// O(N^4) transform straight from the definition.
std::complex<double> direct_dft_coeff(const ImageTensor& img, int u, int v) {
    std::complex<double> acc{};
    const int h = img.height();
    const int w = img.width();
    for (int x = 0; x < h; ++x) {
        for (int y = 0; y < w; ++y) {
            const double ang = -2.0 * std::numbers::pi *
                               (static_cast<double>(u) * x / h + static_cast<double>(v) * y / w);
            acc += img.at(x, y) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
    }
    return acc;
}

// Direct-formula SSIM: per-pixel 11x11 Gaussian window evaluated without
// separability, reflected borders.
double direct_ssim(const ImageTensor& a, const ImageTensor& b) {
    const int radius = 5;
    const double sigma = 1.5;
    double weights[11][11];
    double wsum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            weights[dy + radius][dx + radius] = std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
            wsum += weights[dy + radius][dx + radius];
        }
    }
    for (auto& row : weights) {
        for (double& w : row) w /= wsum;
    }
    auto reflect = [](int i, int n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
        return i;
    };
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        double acc = 0.0;
        for (int y = 0; y < a.height(); ++y) {
            for (int x = 0; x < a.width(); ++x) {
                double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
                for (int dy = -radius; dy <= radius; ++dy) {
                    for (int dx = -radius; dx <= radius; ++dx) {
                        const double w = weights[dy + radius][dx + radius];
                        const double va = a.at(reflect(y + dy, a.height()), reflect(x + dx, a.width()), c);
                        const double vb = b.at(reflect(y + dy, b.height()), reflect(x + dx, b.width()), c);
                        ma += w * va;
                        mb += w * vb;
                        maa += w * va * va;
                        mbb += w * vb * vb;
                        mab += w * va * vb;
                    }
                }
                const double var_a = maa - ma * ma;
                const double var_b = mbb - mb * mb;
                const double cov = mab - ma * mb;
                acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
            }
        }
        total += acc / (static_cast<double>(a.height()) * a.width());
    }
    return total / a.channels();
}

// Central finite differences on a scalar function of a flat buffer.
bool fd_matches(std::vector<double>& x, const std::function<double()>& f,
                const std::vector<double>& analytic, double h, double rel, double abs_tol,
                double& worst) {
    bool ok = true;
    worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double fp = f();
        x[i] = keep - h;
        const double fm = f();
        x[i] = keep;
        const double fd = (fp - fm) / (2.0 * h);
        const double err = std::abs(fd - analytic[i]);
        const double limit = abs_tol + rel * std::max(std::abs(fd), std::abs(analytic[i]));
        worst = std::max(worst, err - limit);
        if (err > limit) ok = false;
    }
    return ok;
}

// Weighted-sum loss over a sequential stack; validates input and parameter
// gradients of every layer in the stack.
bool check_stack_gradients(std::vector<nn::Layer>& layers, nn::Volume x, Rng& rng,
                           double rel, double abs_tol, double& worst) {
    std::vector<double> loss_w;
    {
        std::vector<nn::Volume> trace;
        const nn::Volume out = nn::forward(layers, x, &trace);
        loss_w.resize(out.size());
        for (double& w : loss_w) w = rng.normal(0.0, 1.0);
    }
    auto loss = [&] {
        const nn::Volume out = nn::forward(layers, x);
        double acc = 0.0;
        for (std::size_t i = 0; i < out.v.size(); ++i) acc += loss_w[i] * out.v[i];
        return acc;
    };

    std::vector<nn::Volume> trace;
    const nn::Volume out = nn::forward(layers, x, &trace);
    nn::Volume dout(out.h, out.w, out.c);
    for (std::size_t i = 0; i < out.v.size(); ++i) dout.v[i] = loss_w[i];
    auto params = nn::parameters(layers);
    nn::zero_grads(params);
    const nn::Volume dx = nn::backward(layers, trace, dout);

    worst = -std::numeric_limits<double>::infinity();
    double w1 = 0.0;
    bool ok = fd_matches(x.v, loss, dx.v, 1e-6, rel, abs_tol, w1);
    worst = std::max(worst, w1);
    for (nn::Param* p : params) {
        ok = fd_matches(p->value, loss, p->grad, 1e-6, rel, abs_tol, w1) && ok;
        worst = std::max(worst, w1);
    }
    return ok;
}

} // namespace

SelfTestReport run_selftest() {
    SelfTestReport report;
    Rng rng(0x5e1f7e57);

    // DFT round trip, several shapes including a non-power-of-two one.
    {
        double worst = 0.0;
        for (auto [h, w] : {std::pair{8, 8}, {16, 16}, {12, 9}}) {
            const ImageTensor img = random_image(rng, h, w);
            const ImageTensor back = idft2(dft2(img));
            worst = std::max(worst, max_abs(back - img));
        }
        report.checks.push_back({"dft round-trip", worst <= 1e-9, detail_line(worst, 1e-9)});
    }

    // Parseval: sum |x|^2 == sum |F|^2 / (H*W).
    {
        double worst = 0.0;
        for (auto [h, w] : {std::pair{16, 16}, {12, 9}}) {
            const ImageTensor img = random_image(rng, h, w);
            double spatial = 0.0;
            for (double v : img.data()) spatial += v * v;
            const double spectral = dft2(img).total_energy() / (static_cast<double>(h) * w);
            worst = std::max(worst, std::abs(spatial - spectral) / spatial);
        }
        report.checks.push_back({"parseval", worst <= 1e-9, detail_line(worst, 1e-9)});
    }

    // Forward transform against the direct O(N^4) definition on 8x8.
    {
        const ImageTensor img = random_image(rng, 8, 8);
        const FrequencyGrid g = dft2(img);
        double scale = 0.0, worst = 0.0;
        for (int u = 0; u < 8; ++u) {
            for (int v = 0; v < 8; ++v) scale = std::max(scale, std::abs(g.at(u, v)));
        }
        for (int u = 0; u < 8; ++u) {
            for (int v = 0; v < 8; ++v) {
                worst = std::max(worst, std::abs(g.at(u, v) - direct_dft_coeff(img, u, v)) / scale);
            }
        }
        report.checks.push_back({"dft vs direct summation", worst <= 1e-6, detail_line(worst, 1e-6)});
    }

    // Per-layer finite-difference gradient checks.
    {
        struct Case {
            const char* name;
            std::vector<nn::Layer> layers;
            int h, w, c;
        };
        Rng init = rng.substream("layer-init");
        std::vector<Case> cases;
        cases.push_back({"conv s1", {}, 5, 5, 2});
        cases.back().layers.emplace_back(nn::Conv2d(2, 3, 1, init));
        cases.push_back({"conv s2", {}, 6, 6, 2});
        cases.back().layers.emplace_back(nn::Conv2d(2, 3, 2, init));
        cases.push_back({"relu", {}, 4, 4, 3});
        cases.back().layers.emplace_back(nn::ReLU{});
        cases.push_back({"global avg pool", {}, 5, 4, 3});
        cases.back().layers.emplace_back(nn::GlobalAvgPool{});
        cases.push_back({"dense", {}, 1, 1, 12});
        cases.back().layers.emplace_back(nn::Dense(12, 7, init));
        cases.push_back({"l2 normalize", {}, 1, 1, 8});
        cases.back().layers.emplace_back(nn::L2Normalize{});

        for (auto& c : cases) {
            nn::Volume x(c.h, c.w, c.c);
            for (double& v : x.v) v = rng.normal(0.0, 1.0);
            double worst = 0.0;
            const bool ok = check_stack_gradients(c.layers, x, rng, 1e-3, 1e-7, worst);
            report.checks.push_back({std::string("grad check: ") + c.name, ok,
                                     margin_line(worst)});
        }
    }

    // Whole embedder (covers the composed stack) and whole recon net
    // (covers upsample, concat and skip connections).
    {
        SurrogateEmbedder m = init_embedder("tiny-a", 7, 16, 1);
        double worst = 0.0;
        nn::Volume x(16, 16, 1);
        for (double& v : x.v) v = rng.uniform();
        const bool ok = check_stack_gradients(m.layers, x, rng, 1e-3, 1e-7, worst);
        report.checks.push_back({"grad check: embedder stack", ok, margin_line(worst)});
    }
    {
        ReconNet net(1, 3, 11);
        nn::Volume x(8, 8, 1);
        for (double& v : x.v) v = rng.uniform();
        std::vector<double> loss_w(x.size());
        for (double& w : loss_w) w = rng.normal(0.0, 1.0);
        auto loss = [&] {
            const nn::Volume out = net.forward(x);
            double acc = 0.0;
            for (std::size_t i = 0; i < out.v.size(); ++i) acc += loss_w[i] * out.v[i];
            return acc;
        };
        ReconNet::Trace trace;
        const nn::Volume out = net.forward(x, &trace);
        nn::Volume dout(out.h, out.w, out.c);
        for (std::size_t i = 0; i < out.v.size(); ++i) dout.v[i] = loss_w[i];
        auto params = net.parameters();
        nn::zero_grads(params);
        const nn::Volume dx = net.backward(trace, dout);

        double worst = -std::numeric_limits<double>::infinity();
        double w1 = 0.0;
        bool ok = fd_matches(x.v, loss, dx.v, 1e-6, 1e-3, 1e-7, w1);
        worst = std::max(worst, w1);
        for (nn::Param* p : params) {
            ok = fd_matches(p->value, loss, p->grad, 1e-6, 1e-3, 1e-7, w1) && ok;
            worst = std::max(worst, w1);
        }
        report.checks.push_back({"grad check: recon net", ok, margin_line(worst)});
    }

    // Entropy gradient vs central differences (h = 1e-5).
    {
        EntropySpec spec;
        spec.bins = 32;
        spec.bandwidth = 1.0 / 32.0;
        ImageTensor img = random_image(rng, 8, 8);
        const ImageTensor analytic = soft_entropy_grad(img, spec);
        auto f = [&] { return soft_entropy(img, spec); };
        double worst = -std::numeric_limits<double>::infinity();
        bool ok = true;
        auto d = img.data();
        auto g = analytic.data();
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double keep = d[i];
            d[i] = keep + 1e-5;
            const double fp = f();
            d[i] = keep - 1e-5;
            const double fm = f();
            d[i] = keep;
            const double fd = (fp - fm) / 2e-5;
            const double err = std::abs(fd - g[i]);
            const double limit = 1e-7 + 1e-3 * std::max(std::abs(fd), std::abs(g[i]));
            worst = std::max(worst, err - limit);
            if (err > limit) ok = false;
        }
        report.checks.push_back({"grad check: soft entropy", ok, margin_line(worst)});
    }

    // Ensemble recognition gradient vs central differences (h = 1e-4).
    {
        EnsembleSpec ens;
        ens.members.push_back(init_embedder("tiny-a", 3, 16, 1));
        ens.members.push_back(init_embedder("tiny-c", 4, 16, 1));
        ens.betas = {200.0, 200.0};
        const ImageTensor x_ref = random_image(rng, 16, 16);
        ImageTensor x_t = random_image(rng, 16, 16);
        const auto [loss0, grad] = recognition_loss_grad(ens, x_ref, x_t);
        double worst = -std::numeric_limits<double>::infinity();
        bool ok = true;
        auto d = x_t.data();
        auto g = grad.data();
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double keep = d[i];
            d[i] = keep + 1e-4;
            const double fp = recognition_loss_grad(ens, x_ref, x_t).first;
            d[i] = keep - 1e-4;
            const double fm = recognition_loss_grad(ens, x_ref, x_t).first;
            d[i] = keep;
            const double fd = (fp - fm) / 2e-4;
            const double err = std::abs(fd - g[i]);
            const double limit = 1e-7 + 2e-3 * std::max(std::abs(fd), std::abs(g[i]));
            worst = std::max(worst, err - limit);
            if (err > limit) ok = false;
        }
        report.checks.push_back({"grad check: recognition loss", ok, margin_line(worst)});
    }

    // SSIM against the direct-formula evaluation on 20 random 16x16 pairs.
    {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const ImageTensor a = random_image(rng, 16, 16);
            const ImageTensor b = random_image(rng, 16, 16);
            worst = std::max(worst, std::abs(ssim(a, b) - direct_ssim(a, b)));
        }
        report.checks.push_back({"ssim vs direct formula", worst <= 1e-9, detail_line(worst, 1e-9)});
    }

    return report;
}

} // namespace veilforge
