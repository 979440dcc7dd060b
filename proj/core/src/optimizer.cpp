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

#include "veilforge/optimizer.hpp"

#include <chrono>
#include <cmath>

#include "veilforge/errors.hpp"
#include "veilforge/metrics.hpp"
#include "veilforge/parallel.hpp"

namespace veilforge {

namespace {

void validate_pixel_range(const ImageTensor& x, const char* op) {
    for (double v : x.data()) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValueError(std::string(op) + ": input pixels must lie in [0,1]");
        }
    }
}

double scaled_norm(const ImageTensor& g, NormP p) {
    switch (p) {
    case NormP::kL1:
        return mean_abs(g); // L1 norm scaled by pixel count
    case NormP::kL2: {
        double acc = 0.0;
        for (double v : g.data()) acc += v * v;
        return std::sqrt(acc / static_cast<double>(g.size()));
    }
    case NormP::kLInf:
    default:
        return max_abs(g);
    }
}

// Noise seed for a run: master seed and the configured noise seed both
// contribute.
std::uint64_t effective_noise_seed(const OptimizerConfig& cfg) {
    return Rng(cfg.master_seed).substream("noise", cfg.noise.seed).seed();
}

} // namespace

void OptimizerConfig::validate() const {
    if (iters < 0) throw ValueError("OptimizerConfig: iters must be >= 0");
    if (!(epsilon_budget >= 0.0)) throw ValueError("OptimizerConfig: epsilon must be >= 0");
    if (iters > 0 && !(alpha() > 0.0)) throw ValueError("OptimizerConfig: alpha must be > 0");
    if (!(momentum >= 0.0)) throw ValueError("OptimizerConfig: momentum must be >= 0");
    if (!(keep_fraction > 0.0 && keep_fraction < 1.0)) {
        throw ValueError("OptimizerConfig: keep_fraction must lie in (0,1)");
    }
    noise.validate();
    entropy.validate();
    highpass.validate();
    padding.validate();
}

PreprocessResult preprocess_detailed(const ImageTensor& x, const OptimizerConfig& cfg,
                                     const Rng& rng) {
    validate_pixel_range(x, "preprocess");

    PreprocessResult result;
    ImageTensor detail = x;
    if (!cfg.ablate.drop_spectral) {
        // Cutoff resolves on the luminance spectrum; each channel is then
        // filtered with that one cutoff.
        const FrequencyGrid lum_grid = dft2(luminance(x));
        result.cutoff = resolve_cutoff(lum_grid, cfg.highpass);
        const FrequencyGrid filtered = high_pass(dft2(x), result.cutoff);
        detail = rescale_minmax(idft2(filtered));
    }

    const RegionMask mask = detail_mask(x, cfg.keep_fraction);
    result.degenerate_mask = mask.is_degenerate();

    if (!cfg.ablate.drop_fill) {
        // Fill statistics come from the original image: the pruned regions
        // inherit plausible local color, not filtered-residue statistics.
        detail = stochastic_fill(detail, x, mask, cfg.padding, rng.substream("preprocess"));
    }
    result.x0 = clamp01(detail);
    return result;
}

ImageTensor preprocess(const ImageTensor& x, const OptimizerConfig& cfg, const Rng& rng) {
    return preprocess_detailed(x, cfg, rng).x0;
}

StepResult step_with_field(const ImageTensor& x_t, const ImageTensor& x_ref,
                           const ImageTensor& momentum, const ImageTensor& field,
                           const OptimizerConfig& cfg, const EnsembleSpec& ens) {
    if (!x_t.same_shape(x_ref) || !x_t.same_shape(momentum)) {
        throw ValueError("step: shape mismatch");
    }
    if (field.height() != x_t.height() || field.width() != x_t.width() || field.channels() != 1) {
        throw ValueError("step: field must be single-channel H x W");
    }

    StepResult r;
    auto [rec_loss, grad] = recognition_loss_grad(ens, x_ref, x_t);
    r.stats.recognition_loss = rec_loss;

    const bool use_entropy = cfg.gamma != 0.0 && !cfg.ablate.drop_noise_entropy;
    if (use_entropy) {
        const double ent = soft_entropy(x_t, cfg.entropy);
        r.stats.entropy_term = cfg.gamma * ent;
        const ImageTensor ent_grad = soft_entropy_grad(x_t, cfg.entropy);
        auto g = grad.data();
        auto eg = ent_grad.data();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += cfg.gamma * eg[i];
    }
    r.stats.total_loss = r.stats.recognition_loss + r.stats.entropy_term;

    const double norm = scaled_norm(grad, cfg.norm_p);
    r.stats.grad_norm = norm;
    r.stats.grad_norm_zero = norm == 0.0;

    // g_{t+1} = mu * g_t + grad / ||grad||; a vanishing norm skips the
    // normalization and accumulates the raw (zero) gradient.
    r.momentum_next = momentum * cfg.momentum;
    {
        auto m = r.momentum_next.data();
        auto g = grad.data();
        const double inv = norm == 0.0 ? 1.0 : 1.0 / norm;
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += g[i] * inv;
    }

    // X_{t+1} = clamp01(X_t + field .* alpha * g_{t+1})
    ImageTensor next = x_t;
    const double alpha = cfg.alpha();
    for (int y = 0; y < next.height(); ++y) {
        for (int x = 0; x < next.width(); ++x) {
            const double f = field.at(y, x);
            for (int c = 0; c < next.channels(); ++c) {
                next.at(y, x, c) += f * alpha * r.momentum_next.at(y, x, c);
            }
        }
    }
    r.x_next = clamp01(next);
    return r;
}

StepResult step(const ImageTensor& x_t, const ImageTensor& x_ref, const ImageTensor& momentum,
                int t, const OptimizerConfig& cfg, const EnsembleSpec& ens) {
    ImageTensor field;
    if (cfg.ablate.drop_noise_entropy) {
        field = ImageTensor::filled(x_t.height(), x_t.width(), 1, 1.0);
    } else {
        NoiseSpec noise = cfg.noise;
        noise.seed = effective_noise_seed(cfg);
        field = temporal_field(noise, static_cast<std::uint64_t>(t), x_t.height(), x_t.width());
    }
    return step_with_field(x_t, x_ref, momentum, field, cfg, ens);
}

std::pair<ImageTensor, RunReport> anonymize(const ImageTensor& x, const OptimizerConfig& cfg,
                                            const EnsembleSpec& ens) {
    cfg.validate();
    ens.validate();
    const auto t0 = std::chrono::steady_clock::now();

    RunReport report;
    report.master_seed = cfg.master_seed;
    report.holdout_index = ens.holdout;

    const Rng rng(cfg.master_seed);
    PreprocessResult pre = preprocess_detailed(x, cfg, rng);
    report.degenerate_mask = pre.degenerate_mask;
    report.resolved_cutoff = pre.cutoff;

    ImageTensor x_t = std::move(pre.x0);
    ImageTensor g = ImageTensor(x.height(), x.width(), x.channels()); // g_0 = 0
    report.iterations.reserve(cfg.iters);
    for (int t = 0; t < cfg.iters; ++t) {
        StepResult r = step(x_t, x, g, t, cfg, ens);
        x_t = std::move(r.x_next);
        g = std::move(r.momentum_next);
        report.iterations.push_back(r.stats);
    }

    report.final_hard_entropy = hard_entropy(x_t, cfg.entropy);
    report.final_ssim = ssim(x, x_t);
    for (const auto& member : ens.members) {
        report.member_cosine.push_back(cos_sim(embed(member, x), embed(member, x_t)));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(x_t), std::move(report)};
}

std::vector<ImageTensor> anonymize_batch(const std::vector<ImageTensor>& images,
                                         const OptimizerConfig& cfg, const EnsembleSpec& ens,
                                         SeedPolicy policy, int threads) {
    std::vector<ImageTensor> out(images.size());
    parallel_for(static_cast<int>(images.size()), threads, [&](int i) {
        OptimizerConfig local = cfg;
        if (policy == SeedPolicy::kPerImage) {
            local.master_seed =
                Rng(cfg.master_seed).substream("image", static_cast<std::uint64_t>(i)).seed();
        }
        out[i] = anonymize(images[i], local, ens).first;
    });
    return out;
}

} // namespace veilforge
