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

#include "veilforge/embedder.hpp"

#include <algorithm>
#include <cmath>

#include "veilforge/errors.hpp"
#include "veilforge/parallel.hpp"

namespace veilforge {

namespace {

nn::Volume to_volume(const ImageTensor& img) {
    nn::Volume v(img.height(), img.width(), img.channels());
    auto d = img.data();
    std::copy(d.begin(), d.end(), v.v.begin());
    return v;
}

void check_input(const SurrogateEmbedder& model, const ImageTensor& img, const char* op) {
    if (img.height() != model.input_h || img.width() != model.input_w ||
        img.channels() != model.input_c) {
        throw ValueError(std::string(op) + ": image dimensions do not match model input");
    }
}

} // namespace

SurrogateEmbedder init_embedder(std::string_view preset, std::uint64_t seed,
                                int input_size, int channels, int embed_dim) {
    if (input_size < 4 || (channels != 1 && channels != 3) || embed_dim < 1) {
        throw ValueError("init_embedder: bad input geometry");
    }
    SurrogateEmbedder m;
    m.preset = std::string(preset);
    m.input_h = m.input_w = input_size;
    m.input_c = channels;
    m.embed_dim = embed_dim;
    m.init_seed = seed;

    Rng rng = Rng(seed).substream("init");
    auto conv = [&](int in, int out) { return nn::Conv2d(in, out, 2, rng); };
    std::vector<nn::Layer>& L = m.layers;

    // Distinct depths and widths per preset: ensemble diversity comes from
    // architecture as much as from the init seed.
    if (preset == "tiny-a") {
        L.emplace_back(conv(channels, 8));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(conv(8, 16));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(nn::GlobalAvgPool{});
        L.emplace_back(nn::Dense(16, embed_dim, rng));
    } else if (preset == "tiny-b") {
        L.emplace_back(conv(channels, 12));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(conv(12, 12));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(conv(12, 24));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(nn::GlobalAvgPool{});
        L.emplace_back(nn::Dense(24, embed_dim, rng));
    } else if (preset == "tiny-c") {
        L.emplace_back(conv(channels, 6));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(conv(6, 20));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(nn::GlobalAvgPool{});
        L.emplace_back(nn::Dense(20, embed_dim, rng));
    } else if (preset == "tiny-d") {
        L.emplace_back(conv(channels, 10));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(conv(10, 16));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(conv(16, 16));
        L.emplace_back(nn::ReLU{});
        L.emplace_back(nn::GlobalAvgPool{});
        L.emplace_back(nn::Dense(16, embed_dim, rng));
    } else {
        throw ValueError("init_embedder: unknown preset '" + std::string(preset) + "'");
    }
    L.emplace_back(nn::L2Normalize{});
    return m;
}

std::vector<double> embed(const SurrogateEmbedder& model, const ImageTensor& img) {
    check_input(model, img, "embed");
    const nn::Volume out = nn::forward(model.layers, to_volume(img));
    return out.v;
}

double cos_sim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValueError("cos_sim: dimension mismatch");
    double na = 0.0, nb = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i] * a[i];
        nb += b[i] * b[i];
        dot += a[i] * b[i];
    }
    if (std::abs(std::sqrt(na) - 1.0) > 1e-4 || std::abs(std::sqrt(nb) - 1.0) > 1e-4) {
        throw ValueError("cos_sim: inputs must be unit-norm");
    }
    return std::clamp(dot, -1.0, 1.0);
}

void EnsembleSpec::validate() const {
    if (members.empty()) throw ValueError("EnsembleSpec: no members");
    if (betas.size() != members.size()) {
        throw ValueError("EnsembleSpec: betas must match member count");
    }
    for (double b : betas) {
        if (!(b > 0.0)) throw ValueError("EnsembleSpec: betas must be > 0");
    }
    if (holdout && *holdout >= members.size()) {
        throw ValueError("EnsembleSpec: holdout index out of range");
    }
    if (active_count() == 0) {
        throw ValueError("EnsembleSpec: effective ensemble is empty");
    }
}

std::size_t EnsembleSpec::active_count() const {
    return members.size() - (holdout ? 1 : 0);
}

std::pair<double, ImageTensor> recognition_loss_grad(const EnsembleSpec& ens,
                                                     const ImageTensor& x_ref,
                                                     const ImageTensor& x_t) {
    ens.validate();
    if (!x_ref.same_shape(x_t)) {
        throw ValueError("recognition_loss_grad: image shapes differ");
    }
    double loss = 0.0;
    ImageTensor grad(x_t.height(), x_t.width(), x_t.channels());
    std::vector<nn::Volume> trace;
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
        if (ens.holdout && *ens.holdout == i) continue;
        const SurrogateEmbedder& member = ens.members[i];
        check_input(member, x_t, "recognition_loss_grad");

        const std::vector<double> e_ref = embed(member, x_ref);
        const nn::Volume e_t = nn::forward(member.layers, to_volume(x_t), &trace);

        double dot = 0.0;
        for (std::size_t j = 0; j < e_ref.size(); ++j) dot += e_ref[j] * e_t.v[j];
        loss += ens.betas[i] * dot;

        // d(beta * <e_ref, e_t>) / d(e_t) = beta * e_ref, then reverse
        // through the member. x_ref is a constant; only x_t is tracked.
        nn::Volume dout(1, 1, member.embed_dim);
        for (std::size_t j = 0; j < e_ref.size(); ++j) dout.v[j] = ens.betas[i] * e_ref[j];
        const nn::Volume dx = nn::backward_input(member.layers, trace, dout);

        auto g = grad.data();
        for (std::size_t j = 0; j < g.size(); ++j) g[j] += dx.v[j];
    }
    return {loss, std::move(grad)};
}

void train_surrogate(SurrogateEmbedder& model,
                     const std::vector<std::pair<int, ImageTensor>>& dataset,
                     const SurrogateTrainConfig& cfg,
                     SurrogateTrainStats* stats) {
    if (dataset.empty()) throw ValueError("train_surrogate: empty dataset");
    for (const auto& [id, img] : dataset) check_input(model, img, "train_surrogate");

    // identity -> sample indices
    std::vector<std::vector<std::size_t>> by_id;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const int id = dataset[i].first;
        if (id < 0) throw ValueError("train_surrogate: negative identity id");
        if (static_cast<std::size_t>(id) >= by_id.size()) by_id.resize(id + 1);
        by_id[id].push_back(i);
    }

    if (by_id.size() < 2) throw ValueError("train_surrogate: need at least two identities");
    for (const auto& pool : by_id) {
        if (pool.empty()) throw ValueError("train_surrogate: identity ids must be dense");
    }

    struct Pair {
        std::size_t a, b;
        bool same;
    };

    auto params = nn::parameters(model.layers);
    nn::Adam adam;
    adam.lr = cfg.lr;
    adam.attach(params);

    const std::size_t flat_size = [&] {
        std::size_t n = 0;
        for (auto* p : params) n += p->value.size();
        return n;
    }();

    Rng epoch_rng = Rng(cfg.seed).substream("surrogate-train");
    const int threads = std::max(1, cfg.threads);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double epoch_loss = 0.0;
        int steps = 0;
        for (int start = 0; start < cfg.pairs_per_epoch; start += cfg.batch_size) {
            const int bs = std::min(cfg.batch_size, cfg.pairs_per_epoch - start);
            std::vector<Pair> batch(bs);
            for (auto& p : batch) {
                p.same = epoch_rng.uniform() < 0.5;
                const auto id_a = static_cast<std::size_t>(epoch_rng.uniform() * by_id.size());
                const auto& pool_a = by_id[std::min(id_a, by_id.size() - 1)];
                p.a = pool_a[static_cast<std::size_t>(epoch_rng.uniform() * pool_a.size()) % pool_a.size()];
                if (p.same) {
                    p.b = pool_a[static_cast<std::size_t>(epoch_rng.uniform() * pool_a.size()) % pool_a.size()];
                } else {
                    auto id_b = static_cast<std::size_t>(epoch_rng.uniform() * by_id.size()) % by_id.size();
                    if (id_b == id_a) id_b = (id_b + 1) % by_id.size();
                    const auto& pool_b = by_id[id_b];
                    p.b = pool_b[static_cast<std::size_t>(epoch_rng.uniform() * pool_b.size()) % pool_b.size()];
                }
            }

            // Per-sample gradients land in per-index slots and are reduced
            // in sample order: results do not depend on the thread count.
            std::vector<std::vector<double>> sample_grads(bs);
            std::vector<double> sample_loss(bs, 0.0);
            std::vector<SurrogateEmbedder> replicas(threads, model);
            parallel_for_workers(bs, threads, [&](int worker, int s) {
                SurrogateEmbedder& rep = replicas[worker];
                auto rep_params = nn::parameters(rep.layers);
                nn::zero_grads(rep_params);

                const Pair& pr = batch[s];
                std::vector<nn::Volume> trace_a, trace_b;
                const nn::Volume e_a = nn::forward(rep.layers, to_volume(dataset[pr.a].second), &trace_a);
                const nn::Volume e_b = nn::forward(rep.layers, to_volume(dataset[pr.b].second), &trace_b);
                double s_ab = 0.0;
                for (std::size_t j = 0; j < e_a.v.size(); ++j) s_ab += e_a.v[j] * e_b.v[j];

                double dsim = 0.0;
                if (pr.same) {
                    sample_loss[s] = 1.0 - s_ab;
                    dsim = -1.0;
                } else if (s_ab > cfg.margin) {
                    sample_loss[s] = s_ab - cfg.margin;
                    dsim = 1.0;
                }
                if (dsim != 0.0) {
                    nn::Volume da(1, 1, rep.embed_dim), db(1, 1, rep.embed_dim);
                    for (std::size_t j = 0; j < e_a.v.size(); ++j) {
                        da.v[j] = dsim * e_b.v[j];
                        db.v[j] = dsim * e_a.v[j];
                    }
                    nn::backward(rep.layers, trace_a, da);
                    nn::backward(rep.layers, trace_b, db);
                }
                auto& flat = sample_grads[s];
                flat.resize(flat_size);
                std::size_t off = 0;
                for (auto* p : rep_params) {
                    std::copy(p->grad.begin(), p->grad.end(), flat.begin() + off);
                    off += p->grad.size();
                }
            });

            nn::zero_grads(params);
            double batch_loss = 0.0;
            for (int s = 0; s < bs; ++s) {
                batch_loss += sample_loss[s];
                std::size_t off = 0;
                for (auto* p : params) {
                    for (std::size_t j = 0; j < p->grad.size(); ++j) p->grad[j] += sample_grads[s][off + j];
                    off += p->grad.size();
                }
            }
            for (auto* p : params) {
                for (double& g : p->grad) g /= bs;
            }
            adam.step(params);
            epoch_loss += batch_loss / bs;
            ++steps;
        }
        if (stats) stats->epoch_loss.push_back(epoch_loss / std::max(1, steps));
    }
}

} // namespace veilforge
