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

#include "veilforge/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "veilforge/errors.hpp"
#include "veilforge/metrics.hpp"
#include "veilforge/parallel.hpp"

namespace veilforge {

namespace {

nn::Volume to_volume(const ImageTensor& img) {
    nn::Volume v(img.height(), img.width(), img.channels());
    auto d = img.data();
    std::copy(d.begin(), d.end(), v.v.begin());
    return v;
}

ImageTensor to_image(const nn::Volume& v) {
    ImageTensor img(v.h, v.w, v.c);
    auto d = img.data();
    std::copy(v.v.begin(), v.v.end(), d.begin());
    return img;
}

} // namespace

ReconNet::ReconNet(int in_channels, int base_channels, std::uint64_t seed)
    : in_ch_(in_channels), base_(base_channels) {
    if (in_channels < 1 || base_channels < 1) throw ValueError("ReconNet: bad configuration");
    Rng rng = Rng(seed).substream("recon-init");
    enc0_ = nn::Conv2d(in_channels, base_channels, 1, rng);
    enc1_ = nn::Conv2d(base_channels, 2 * base_channels, 2, rng);
    enc2_ = nn::Conv2d(2 * base_channels, 4 * base_channels, 2, rng);
    mid_ = nn::Conv2d(4 * base_channels, 4 * base_channels, 1, rng);
    dec1_ = nn::Conv2d(6 * base_channels, 2 * base_channels, 1, rng);
    dec0_ = nn::Conv2d(3 * base_channels, base_channels, 1, rng);
    head_ = nn::Conv2d(base_channels, in_channels, 1, rng);
}

nn::Volume ReconNet::forward(const nn::Volume& x, Trace* trace) const {
    Trace local;
    Trace& t = trace ? *trace : local;
    t.x = x;
    t.a0_pre = enc0_.forward(t.x);
    t.a0 = relu_.forward(t.a0_pre);
    t.a1_pre = enc1_.forward(t.a0);
    t.a1 = relu_.forward(t.a1_pre);
    t.a2_pre = enc2_.forward(t.a1);
    t.a2 = relu_.forward(t.a2_pre);
    t.m_pre = mid_.forward(t.a2);
    t.m = relu_.forward(t.m_pre);
    t.u1 = up_.forward(t.m);
    t.c1 = nn::concat_channels(t.u1, t.a1);
    t.d1_pre = dec1_.forward(t.c1);
    t.d1 = relu_.forward(t.d1_pre);
    t.u0 = up_.forward(t.d1);
    t.c0 = nn::concat_channels(t.u0, t.a0);
    t.d0_pre = dec0_.forward(t.c0);
    t.d0 = relu_.forward(t.d0_pre);
    return head_.forward(t.d0);
}

nn::Volume ReconNet::backward(const Trace& t, const nn::Volume& dout) {
    nn::Volume g = head_.backward(t.d0, dout);
    g = relu_.backward(t.d0_pre, g);
    g = dec0_.backward(t.c0, g);
    auto [du0, da0_skip] = nn::split_channels(g, t.u0.c, t.a0.c);
    g = up_.backward(t.d1, du0);
    g = relu_.backward(t.d1_pre, g);
    g = dec1_.backward(t.c1, g);
    auto [du1, da1_skip] = nn::split_channels(g, t.u1.c, t.a1.c);
    g = up_.backward(t.m, du1);
    g = relu_.backward(t.m_pre, g);
    g = mid_.backward(t.a2, g);
    g = relu_.backward(t.a2_pre, g);
    g = enc2_.backward(t.a1, g);
    // skip contributions join the main path at the encoder activations
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] += da1_skip.v[i];
    g = relu_.backward(t.a1_pre, g);
    g = enc1_.backward(t.a0, g);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] += da0_skip.v[i];
    g = relu_.backward(t.a0_pre, g);
    return enc0_.backward(t.x, g);
}

ImageTensor ReconNet::reconstruct(const ImageTensor& x) const {
    if (x.channels() != in_ch_) throw ValueError("ReconNet: channel mismatch");
    return clamp01(to_image(forward(to_volume(x))));
}

std::vector<nn::Param*> ReconNet::parameters() {
    std::vector<nn::Param*> out;
    for (nn::Conv2d* c : conv_blocks()) {
        out.push_back(&c->weight);
        out.push_back(&c->bias);
    }
    return out;
}

std::size_t ReconNet::parameter_count() const {
    std::size_t n = 0;
    for (const nn::Conv2d* c : conv_blocks()) {
        n += c->weight.value.size() + c->bias.value.size();
    }
    return n;
}

std::vector<const nn::Conv2d*> ReconNet::conv_blocks() const {
    return {&enc0_, &enc1_, &enc2_, &mid_, &dec1_, &dec0_, &head_};
}

std::vector<nn::Conv2d*> ReconNet::conv_blocks() {
    return {&enc0_, &enc1_, &enc2_, &mid_, &dec1_, &dec0_, &head_};
}

void train_recon(const std::vector<std::pair<ImageTensor, ImageTensor>>& pairs, ReconNet& net,
                 const ReconTrainConfig& cfg, ReconTrainReport* report) {
    if (pairs.empty()) throw ValueError("train_recon: no pairs");
    for (const auto& [in, target] : pairs) {
        if (!in.same_shape(target) || in.channels() != net.in_channels()) {
            throw ValueError("train_recon: inconsistent pair dimensions");
        }
    }
    if (cfg.epochs <= 0) return;

    const auto n_val = static_cast<std::size_t>(cfg.val_fraction * static_cast<double>(pairs.size()));
    const std::size_t n_train = pairs.size() - n_val;
    if (n_train == 0) throw ValueError("train_recon: validation split leaves no training pairs");

    auto params = net.parameters();
    nn::Adam adam;
    adam.lr = cfg.lr;
    adam.attach(params);

    const std::size_t flat_size = [&] {
        std::size_t n = 0;
        for (auto* p : params) n += p->value.size();
        return n;
    }();

    Rng shuffle_rng = Rng(cfg.seed).substream("recon-train");
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const int threads = std::max(1, cfg.threads);
    double current_lr = cfg.lr;
    double best_val = std::numeric_limits<double>::infinity();
    int stall = 0;

    auto eval_mse = [&](std::size_t begin, std::size_t end) {
        if (begin >= end) return 0.0;
        std::vector<double> losses(end - begin, 0.0);
        parallel_for(static_cast<int>(end - begin), threads, [&](int i) {
            const auto& [in, target] = pairs[begin + i];
            const nn::Volume out = net.forward(to_volume(in));
            double mse = 0.0;
            const nn::Volume tv = to_volume(target);
            for (std::size_t j = 0; j < out.v.size(); ++j) {
                const double d = out.v[j] - tv.v[j];
                mse += d * d;
            }
            losses[i] = mse / static_cast<double>(out.v.size());
        });
        double acc = 0.0;
        for (double l : losses) acc += l;
        return acc / static_cast<double>(losses.size());
    };

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with the dedicated stream; identical shuffle for any
        // thread count.
        for (std::size_t i = n_train; i > 1; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform() * static_cast<double>(i));
            std::swap(order[i - 1], order[std::min(j, i - 1)]);
        }

        adam.lr = current_lr;
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const int bs = static_cast<int>(std::min<std::size_t>(cfg.batch_size, n_train - start));
            std::vector<std::vector<double>> sample_grads(bs);
            std::vector<double> sample_loss(bs, 0.0);
            std::vector<ReconNet> replicas(threads, net);
            parallel_for_workers(bs, threads, [&](int worker, int s) {
                ReconNet& rep = replicas[worker];
                auto rep_params = rep.parameters();
                nn::zero_grads(rep_params);

                const auto& [in, target] = pairs[order[start + s]];
                ReconNet::Trace trace;
                const nn::Volume out = rep.forward(to_volume(in), &trace);
                const nn::Volume tv = to_volume(target);
                nn::Volume dout(out.h, out.w, out.c);
                double mse = 0.0;
                const double inv = 2.0 / static_cast<double>(out.v.size());
                for (std::size_t j = 0; j < out.v.size(); ++j) {
                    const double d = out.v[j] - tv.v[j];
                    mse += d * d;
                    dout.v[j] = inv * d;
                }
                sample_loss[s] = mse / static_cast<double>(out.v.size());
                rep.backward(trace, dout);

                auto& flat = sample_grads[s];
                flat.resize(flat_size);
                std::size_t off = 0;
                for (auto* p : rep_params) {
                    std::copy(p->grad.begin(), p->grad.end(), flat.begin() + off);
                    off += p->grad.size();
                }
            });

            nn::zero_grads(params);
            for (int s = 0; s < bs; ++s) {
                epoch_loss += sample_loss[s];
                std::size_t off = 0;
                for (auto* p : params) {
                    for (std::size_t j = 0; j < p->grad.size(); ++j) {
                        p->grad[j] += sample_grads[s][off + j];
                    }
                    off += p->grad.size();
                }
            }
            for (auto* p : params) {
                for (double& g : p->grad) g /= bs;
            }
            adam.step(params);
            ++batches;
        }

        const double train_mse = epoch_loss / static_cast<double>(n_train);
        const double val_mse = n_val > 0 ? eval_mse(n_train, pairs.size()) : train_mse;
        if (report) {
            report->train_mse.push_back(train_mse);
            report->val_mse.push_back(val_mse);
            report->lr.push_back(current_lr);
        }

        // ReduceLROnPlateau: halve after `patience` epochs without
        // validation improvement.
        if (val_mse < best_val - 1e-12) {
            best_val = val_mse;
            stall = 0;
        } else if (++stall > cfg.plateau_patience) {
            current_lr *= cfg.plateau_factor;
            stall = 0;
        }
    }
}

namespace {

struct GapDataset {
    std::vector<std::pair<int, ImageTensor>> train;   // (identity, original)
    std::vector<std::pair<int, ImageTensor>> holdout;
    ImageTensor mean_image;
};

GapDataset split_dataset(const GapBudget& budget) {
    const auto all = gen_dataset(budget.data);
    const int holdout_ids = std::max(
        1, static_cast<int>(budget.holdout_identity_fraction * budget.data.identities));
    const int first_holdout = budget.data.identities - holdout_ids;

    GapDataset d;
    ImageTensor acc(budget.data.image_size, budget.data.image_size, budget.data.channels);
    for (const auto& [id, img] : all) {
        if (id >= first_holdout) {
            d.holdout.emplace_back(id, img);
        } else {
            d.train.emplace_back(id, img);
        }
        acc = acc + img;
    }
    d.mean_image = acc * (1.0 / static_cast<double>(all.size()));
    return d;
}

std::vector<ImageTensor> originals_of(const std::vector<std::pair<int, ImageTensor>>& set) {
    std::vector<ImageTensor> out;
    out.reserve(set.size());
    for (const auto& [id, img] : set) out.push_back(img);
    return out;
}

AttackResult attack_once(const std::vector<std::pair<ImageTensor, ImageTensor>>& train_pairs,
                         const std::vector<std::pair<ImageTensor, ImageTensor>>& eval_pairs,
                         const ImageTensor& mean_image, const GapBudget& budget) {
    ReconNet net(budget.data.channels, 8, budget.train.seed);
    ReconTrainConfig cfg = budget.train;
    cfg.threads = budget.threads;
    train_recon(train_pairs, net, cfg);

    AttackResult r;
    r.train_pairs = train_pairs.size();
    r.epochs = cfg.epochs;
    r.seed = cfg.seed;
    std::vector<double> s(eval_pairs.size()), p(eval_pairs.size()), sm(eval_pairs.size());
    parallel_for(static_cast<int>(eval_pairs.size()), budget.threads, [&](int i) {
        const ImageTensor rec = net.reconstruct(eval_pairs[i].first);
        s[i] = ssim(eval_pairs[i].second, rec);
        p[i] = psnr(eval_pairs[i].second, rec);
        sm[i] = ssim(mean_image, rec);
    });
    for (std::size_t i = 0; i < eval_pairs.size(); ++i) {
        r.mean_ssim += s[i];
        r.mean_psnr += p[i];
        r.ssim_to_mean += sm[i];
    }
    const auto n = static_cast<double>(eval_pairs.size());
    r.mean_ssim /= n;
    r.mean_psnr /= n;
    r.ssim_to_mean /= n;
    return r;
}

std::vector<std::pair<ImageTensor, ImageTensor>> make_pairs(
    const std::vector<std::pair<int, ImageTensor>>& set, const OptimizerConfig& pipeline,
    const EnsembleSpec& ens, SeedPolicy policy, std::uint64_t batch_seed, int threads) {
    OptimizerConfig cfg = pipeline;
    cfg.master_seed = batch_seed;
    const std::vector<ImageTensor> anonymized =
        anonymize_batch(originals_of(set), cfg, ens, policy, threads);
    std::vector<std::pair<ImageTensor, ImageTensor>> pairs;
    pairs.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        pairs.emplace_back(anonymized[i], set[i].second);
    }
    return pairs;
}

} // namespace

GapResult learnability_gap(const OptimizerConfig& pipeline, const EnsembleSpec& ens,
                           const GapBudget& budget) {
    const GapDataset data = split_dataset(budget);
    if (data.holdout.empty() || data.train.empty()) {
        throw ValueError("learnability_gap: degenerate identity split");
    }

    GapResult result;
    const std::uint64_t seed_a = Rng(budget.seed).substream("gap-A").seed();
    const std::uint64_t seed_b = Rng(budget.seed).substream("gap-B").seed();

    // A: one fixed seed for every image (a learnable, reversible encoding).
    const auto train_a =
        make_pairs(data.train, pipeline, ens, SeedPolicy::kFixed, seed_a, budget.threads);
    const auto eval_a =
        make_pairs(data.holdout, pipeline, ens, SeedPolicy::kFixed, seed_a, budget.threads);
    result.deterministic = attack_once(train_a, eval_a, data.mean_image, budget);

    // B: fresh derived seed per image (the stochastic mapping).
    const auto train_b =
        make_pairs(data.train, pipeline, ens, SeedPolicy::kPerImage, seed_b, budget.threads);
    const auto eval_b =
        make_pairs(data.holdout, pipeline, ens, SeedPolicy::kPerImage,
                   Rng(seed_b).substream("eval").seed(), budget.threads);
    result.stochastic = attack_once(train_b, eval_b, data.mean_image, budget);

    result.gap = result.deterministic.mean_ssim - result.stochastic.mean_ssim;
    return result;
}

std::vector<SweepPoint> attack_size_sweep(const OptimizerConfig& pipeline,
                                          const EnsembleSpec& ens, const GapBudget& budget,
                                          SeedPolicy policy, const std::vector<double>& fractions) {
    const GapDataset data = split_dataset(budget);
    const std::uint64_t seed = Rng(budget.seed).substream("sweep").seed();
    const auto train_pairs = make_pairs(data.train, pipeline, ens, policy, seed, budget.threads);
    const auto eval_pairs = make_pairs(data.holdout, pipeline, ens, policy,
                                       policy == SeedPolicy::kFixed
                                           ? seed
                                           : Rng(seed).substream("eval").seed(),
                                       budget.threads);

    std::vector<SweepPoint> points;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw ValueError("attack_size_sweep: fractions must lie in (0,1]");
        const auto n = std::max<std::size_t>(
            8, static_cast<std::size_t>(f * static_cast<double>(train_pairs.size())));
        std::vector<std::pair<ImageTensor, ImageTensor>> subset(
            train_pairs.begin(), train_pairs.begin() + std::min(n, train_pairs.size()));
        const AttackResult r = attack_once(subset, eval_pairs, data.mean_image, budget);
        points.push_back({f, subset.size(), r.mean_ssim, r.mean_psnr});
    }
    return points;
}

} // namespace veilforge
