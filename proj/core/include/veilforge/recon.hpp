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
#include <utility>
#include <vector>

#include "veilforge/nn/layers.hpp"
#include "veilforge/optimizer.hpp"
#include "veilforge/synth.hpp"
#include "veilforge/tensor.hpp"

namespace veilforge {

// Convolutional encoder-decoder with skip connections (two downsample
// stages, mirror decoder). Output dims equal input dims.
class ReconNet {
public:
    ReconNet() = default;
    ReconNet(int in_channels, int base_channels, std::uint64_t seed);

    int in_channels() const noexcept { return in_ch_; }
    int base_channels() const noexcept { return base_; }

    ImageTensor reconstruct(const ImageTensor& x) const;

    struct Trace; // forward activations for the backward pass

    nn::Volume forward(const nn::Volume& x, Trace* trace = nullptr) const;
    // Accumulates parameter gradients; returns dL/d(input).
    nn::Volume backward(const Trace& trace, const nn::Volume& dout);

    std::vector<nn::Param*> parameters();
    std::size_t parameter_count() const;

    // Serialization order of the conv blocks (checkpoint contract).
    std::vector<const nn::Conv2d*> conv_blocks() const;
    std::vector<nn::Conv2d*> conv_blocks();

private:
    int in_ch_ = 0, base_ = 0;
    nn::Conv2d enc0_, enc1_, enc2_, mid_, dec1_, dec0_, head_;
    nn::Upsample2x up_;
    nn::ReLU relu_;
};

struct ReconNet::Trace {
    nn::Volume x, a0_pre, a0, a1_pre, a1, a2_pre, a2, m_pre, m;
    nn::Volume u1, c1, d1_pre, d1, u0, c0, d0_pre, d0;
};

struct ReconTrainConfig {
    int epochs = 50;
    double lr = 1e-4; // Adam
    int batch_size = 16;
    double val_fraction = 0.1; // trailing slice of pairs, scheduler only
    int plateau_patience = 5;
    double plateau_factor = 0.5;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ReconTrainReport {
    std::vector<double> train_mse; // per epoch
    std::vector<double> val_mse;
    std::vector<double> lr; // effective lr per epoch (plateau schedule)
};

// MSE regression on (input, target) pairs. Deterministic per seed for any
// thread count (per-sample gradients reduce in sample order).
void train_recon(const std::vector<std::pair<ImageTensor, ImageTensor>>& pairs, ReconNet& net,
                 const ReconTrainConfig& cfg, ReconTrainReport* report = nullptr);

struct AttackResult {
    double mean_ssim = 0.0;      // recon vs original, held-out set
    double mean_psnr = 0.0;
    double ssim_to_mean = 0.0;   // recon vs dataset mean image
    std::size_t train_pairs = 0;
    int epochs = 0;
    std::uint64_t seed = 0;
};

struct GapBudget {
    SynthFaceSpec data;
    double holdout_identity_fraction = 0.2;
    ReconTrainConfig train;
    int threads = 1;
    std::uint64_t seed = 0; // batch seeding for anonymizers
};

struct GapResult {
    AttackResult deterministic; // anonymizer A: fixed seed per image
    AttackResult stochastic;    // anonymizer B: fresh seed per image
    double gap = 0.0;           // deterministic.mean_ssim - stochastic.mean_ssim
};

// Trains one attack net per anonymizer on identical budgets and evaluates
// on held-out identities. A uses SeedPolicy::kFixed, B kPerImage; everything
// else (architecture, epochs, schedule, seeds) is shared.
GapResult learnability_gap(const OptimizerConfig& pipeline, const EnsembleSpec& ens,
                           const GapBudget& budget);

struct SweepPoint {
    double fraction = 1.0;
    std::size_t train_pairs = 0;
    double mean_ssim = 0.0;
    double mean_psnr = 0.0;
};

// Data-size sweep for one anonymizer/seed policy: trains on the leading
// fraction of the training pairs, evaluates on the same held-out set.
std::vector<SweepPoint> attack_size_sweep(const OptimizerConfig& pipeline,
                                          const EnsembleSpec& ens, const GapBudget& budget,
                                          SeedPolicy policy, const std::vector<double>& fractions);

} // namespace veilforge
