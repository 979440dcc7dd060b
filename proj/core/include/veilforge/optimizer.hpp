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
#include <optional>
#include <vector>

#include "veilforge/embedder.hpp"
#include "veilforge/entropy.hpp"
#include "veilforge/masking.hpp"
#include "veilforge/noise.hpp"
#include "veilforge/spectral.hpp"
#include "veilforge/tensor.hpp"

namespace veilforge {

enum class NormP { kL1, kL2, kLInf };

// Pipeline stage switches mirroring the ablation protocol: F = spectral
// filtering, C = stochastic fill, P = per-step noise and entropy term.
struct AblationSet {
    bool drop_spectral = false;      // w/o F
    bool drop_fill = false;          // w/o C
    bool drop_noise_entropy = false; // w/o P
};

struct OptimizerConfig {
    int iters = 100;
    double epsilon_budget = 3.0; // 0-255 intensity units; calibrates alpha only
    std::optional<double> alpha_override;
    double momentum = 1.0;
    double gamma = 50.0;
    NormP norm_p = NormP::kL1;
    NoiseSpec noise;
    EntropySpec entropy;
    HighPassSpec highpass;
    PaddingSpec padding;
    double keep_fraction = 0.25;
    std::uint64_t master_seed = 0;
    AblationSet ablate;

    // alpha = 100 * epsilon / iters, converted from 0-255 to [0,1] units.
    double alpha() const {
        return alpha_override ? *alpha_override
                              : 100.0 * epsilon_budget / static_cast<double>(iters) / 255.0;
    }
    void validate() const;
};

struct IterationStats {
    double recognition_loss = 0.0;
    double entropy_term = 0.0; // gamma * soft entropy
    double total_loss = 0.0;
    double grad_norm = 0.0;    // the p-norm used for normalization
    bool grad_norm_zero = false;
};

struct RunReport {
    std::vector<IterationStats> iterations;
    double final_hard_entropy = 0.0;
    double final_ssim = 0.0;                // SSIM(X, X')
    std::vector<double> member_cosine;      // cos(embed(X), embed(X')) per member
    std::optional<std::size_t> holdout_index;
    bool degenerate_mask = false;
    double resolved_cutoff = 0.0;
    std::uint64_t master_seed = 0;
    double wall_seconds = 0.0;
};

struct PreprocessResult {
    ImageTensor x0;
    bool degenerate_mask = false;
    double cutoff = 0.0;
};

// Spectral prune + min-max rescale + stochastic fill. The cutoff resolves on
// the luminance spectrum; fill statistics come from the original image.
PreprocessResult preprocess_detailed(const ImageTensor& x, const OptimizerConfig& cfg,
                                     const Rng& rng);
ImageTensor preprocess(const ImageTensor& x, const OptimizerConfig& cfg, const Rng& rng);

struct StepResult {
    ImageTensor x_next;
    ImageTensor momentum_next;
    IterationStats stats;
};

// One ascent step with an explicit noise field (test hook and ablation
// path). The field must be single-channel, H x W; it broadcasts across
// channels.
StepResult step_with_field(const ImageTensor& x_t, const ImageTensor& x_ref,
                           const ImageTensor& momentum, const ImageTensor& field,
                           const OptimizerConfig& cfg, const EnsembleSpec& ens);

// One ascent step; the noise field is the temporal octave field at t.
StepResult step(const ImageTensor& x_t, const ImageTensor& x_ref, const ImageTensor& momentum,
                int t, const OptimizerConfig& cfg, const EnsembleSpec& ens);

// Full pipeline: preprocess then cfg.iters steps. Deterministic per
// (x, cfg.master_seed).
std::pair<ImageTensor, RunReport> anonymize(const ImageTensor& x, const OptimizerConfig& cfg,
                                            const EnsembleSpec& ens);

enum class SeedPolicy {
    kFixed,   // same master seed for every image: a reversible encoding
    kPerImage // fresh derived seed per image: the stochastic mapping
};

// Anonymizes a batch in parallel with per-image seeds derived from
// cfg.master_seed under the given policy.
std::vector<ImageTensor> anonymize_batch(const std::vector<ImageTensor>& images,
                                         const OptimizerConfig& cfg, const EnsembleSpec& ens,
                                         SeedPolicy policy, int threads);

} // namespace veilforge
