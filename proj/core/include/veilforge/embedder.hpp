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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "veilforge/nn/layers.hpp"
#include "veilforge/rng.hpp"
#include "veilforge/tensor.hpp"

namespace veilforge {

// Small differentiable network mapping an image to a unit-norm embedding.
// Stands in for a face-recognition model.
struct SurrogateEmbedder {
    std::string preset;
    int input_h = 112, input_w = 112, input_c = 3;
    int embed_dim = 32;
    std::uint64_t init_seed = 0;
    std::vector<nn::Layer> layers;

    std::size_t parameter_count() const { return nn::parameter_count(layers); }
};

// Presets tiny-a .. tiny-d differ in depth and width so ensemble members
// disagree enough to emulate model diversity.
SurrogateEmbedder init_embedder(std::string_view preset, std::uint64_t seed,
                                int input_size = 112, int channels = 3, int embed_dim = 32);

// Unit-norm embedding of an image whose dimensions match the model.
std::vector<double> embed(const SurrogateEmbedder& model, const ImageTensor& img);

// Dot product of two unit vectors; deviation from unit norm beyond 1e-4 is
// an error.
double cos_sim(std::span<const double> a, std::span<const double> b);

struct EnsembleSpec {
    std::vector<SurrogateEmbedder> members;
    std::vector<double> betas;             // per-member weight, default 200
    std::optional<std::size_t> holdout;    // excluded from loss and gradient

    void validate() const;
    std::size_t active_count() const;
};

// loss = sum_{i not held out} beta_i * cos(embed_i(X), embed_i(Xt));
// grad = d(loss)/d(Xt) accumulated reverse-mode through every active member.
std::pair<double, ImageTensor> recognition_loss_grad(const EnsembleSpec& ens,
                                                     const ImageTensor& x_ref,
                                                     const ImageTensor& x_t);

// Contrastive training on an identity-labelled dataset: same-identity pairs
// are pulled toward cosine 1, different identities pushed below the margin.
struct SurrogateTrainConfig {
    int epochs = 12;
    int pairs_per_epoch = 3000;
    int batch_size = 16;
    double lr = 1e-3;
    double margin = 0.2;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct SurrogateTrainStats {
    std::vector<double> epoch_loss;
};

void train_surrogate(SurrogateEmbedder& model,
                     const std::vector<std::pair<int, ImageTensor>>& dataset,
                     const SurrogateTrainConfig& cfg,
                     SurrogateTrainStats* stats = nullptr);

} // namespace veilforge
