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

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "veilforge/embedder.hpp"
#include "veilforge/errors.hpp"
#include "veilforge/nn/checkpoint.hpp"
#include "veilforge/rng.hpp"

using namespace veilforge;

namespace {

ImageTensor random_image(Rng& rng, int n, int c = 1) {
    ImageTensor img(n, n, c);
    for (double& v : img.data()) v = rng.uniform();
    return img;
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

} // namespace

TEST_CASE("embeddings are unit norm and deterministic") {
    Rng rng(51);
    const SurrogateEmbedder m = init_embedder("tiny-a", 1, 32, 1);
    const ImageTensor img = random_image(rng, 32);
    const auto e1 = embed(m, img);
    const auto e2 = embed(m, img);
    CHECK(e1 == e2);
    CHECK(std::abs(norm2(e1) - 1.0) <= 1e-6);

    CHECK_THROWS_AS(embed(m, random_image(rng, 16)), ValueError);
}

TEST_CASE("zero image through a bias-free net embeds to e1") {
    // biases are zero-initialized, so a fresh net is bias-free
    const SurrogateEmbedder m = init_embedder("tiny-b", 2, 16, 1);
    const auto e = embed(m, ImageTensor(16, 16, 1));
    CHECK(e[0] == 1.0);
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] == 0.0);
}

TEST_CASE("cosine similarity closed forms") {
    std::vector<double> v{0.6, 0.8, 0.0};
    std::vector<double> nv{-0.6, -0.8, 0.0};
    std::vector<double> e1{1.0, 0.0, 0.0};
    std::vector<double> e2{0.0, 1.0, 0.0};
    CHECK(cos_sim(v, v) == doctest::Approx(1.0));
    CHECK(cos_sim(v, nv) == doctest::Approx(-1.0));
    CHECK(cos_sim(e1, e2) == doctest::Approx(0.0));

    std::vector<double> big{1.5, 0.0, 0.0};
    CHECK_THROWS_AS(cos_sim(big, e1), ValueError);
}

TEST_CASE("recognition loss at the similarity maximum") {
    Rng rng(52);
    const ImageTensor x = random_image(rng, 16);

    EnsembleSpec ens;
    ens.members.push_back(init_embedder("tiny-a", 3, 16, 1));
    ens.members.push_back(init_embedder("tiny-b", 4, 16, 1));
    ens.members.push_back(init_embedder("tiny-c", 5, 16, 1));
    ens.betas = {200.0, 200.0, 200.0};

    // X_t = X: every member contributes beta * 1
    const auto [loss, grad] = recognition_loss_grad(ens, x, x);
    CHECK(loss == doctest::Approx(600.0).epsilon(1e-9));
    // cosine sits at its maximum: the normalize layer projects the
    // embedding direction out, so the gradient vanishes identically
    CHECK(max_abs(grad) <= 1e-9);
}

TEST_CASE("recognition gradient matches finite differences") {
    Rng rng(53);
    const ImageTensor x_ref = random_image(rng, 16);
    ImageTensor x_t = random_image(rng, 16);

    EnsembleSpec ens;
    ens.members.push_back(init_embedder("tiny-a", 6, 16, 1));
    ens.betas = {1.0};

    const auto [loss, grad] = recognition_loss_grad(ens, x_ref, x_t);
    auto d = x_t.data();
    const auto fd = oracles::finite_diff(
        d, [&] { return recognition_loss_grad(ens, x_ref, x_t).first; }, 1e-4);
    for (std::size_t i = 0; i < fd.size(); ++i) {
        const double err = std::abs(fd[i] - grad.data()[i]);
        CHECK(err <= 1e-7 + 2e-3 * std::max(std::abs(fd[i]), std::abs(grad.data()[i])));
    }
}

TEST_CASE("holdout member is excluded exactly") {
    Rng rng(54);
    const ImageTensor x = random_image(rng, 16);
    const ImageTensor xt = random_image(rng, 16);

    EnsembleSpec three;
    three.members.push_back(init_embedder("tiny-a", 7, 16, 1));
    three.members.push_back(init_embedder("tiny-b", 8, 16, 1));
    three.members.push_back(init_embedder("tiny-c", 9, 16, 1));
    three.betas = {200.0, 150.0, 100.0};
    three.holdout = 0;

    EnsembleSpec two;
    two.members.push_back(init_embedder("tiny-b", 8, 16, 1));
    two.members.push_back(init_embedder("tiny-c", 9, 16, 1));
    two.betas = {150.0, 100.0};

    const auto [l3, g3] = recognition_loss_grad(three, x, xt);
    const auto [l2, g2] = recognition_loss_grad(two, x, xt);
    CHECK(l3 == l2);
    CHECK(max_abs(g3 - g2) == 0.0);

    EnsembleSpec empty;
    empty.members.push_back(init_embedder("tiny-a", 7, 16, 1));
    empty.betas = {200.0};
    empty.holdout = 0;
    CHECK_THROWS_AS(recognition_loss_grad(empty, x, xt), ValueError);
}

TEST_CASE("ensemble gradient is the beta-weighted sum of member gradients") {
    Rng rng(55);
    const ImageTensor x = random_image(rng, 16);
    const ImageTensor xt = random_image(rng, 16);

    EnsembleSpec ens;
    ens.members.push_back(init_embedder("tiny-a", 10, 16, 1));
    ens.members.push_back(init_embedder("tiny-c", 11, 16, 1));
    ens.betas = {123.0, 77.0};
    const auto [loss, grad] = recognition_loss_grad(ens, x, xt);

    ImageTensor expected(16, 16, 1);
    double expected_loss = 0.0;
    for (std::size_t i = 0; i < ens.members.size(); ++i) {
        EnsembleSpec solo;
        solo.members.push_back(ens.members[i]);
        solo.betas = {ens.betas[i]};
        const auto [l, g] = recognition_loss_grad(solo, x, xt);
        expected_loss += l;
        expected = expected + g;
    }
    CHECK(std::abs(loss - expected_loss) <= 1e-12 * std::abs(loss));
    CHECK(max_abs(grad - expected) <= 1e-12);
}

TEST_CASE("cosine is invariant to pre-normalization scaling") {
    Rng rng(56);
    const ImageTensor a = random_image(rng, 16);
    const ImageTensor b = random_image(rng, 16);

    SurrogateEmbedder m = init_embedder("tiny-a", 12, 16, 1);
    const double before = cos_sim(embed(m, a), embed(m, b));

    // scale the pre-normalization activations by c > 0 via the dense head
    for (auto& layer : m.layers) {
        if (auto* dense = std::get_if<nn::Dense>(&layer)) {
            for (double& w : dense->weight.value) w *= 3.7;
            for (double& bias : dense->bias.value) bias *= 3.7;
        }
    }
    const double after = cos_sim(embed(m, a), embed(m, b));
    CHECK(after == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("presets are reproducible, distinct and sized as frozen") {
    const SurrogateEmbedder a1 = init_embedder("tiny-a", 42, 32, 1);
    const SurrogateEmbedder a2 = init_embedder("tiny-a", 42, 32, 1);
    REQUIRE(a1.layers.size() == a2.layers.size());
    const auto* c1 = std::get_if<nn::Conv2d>(&a1.layers[0]);
    const auto* c2 = std::get_if<nn::Conv2d>(&a2.layers[0]);
    REQUIRE(c1 != nullptr);
    CHECK(c1->weight.value == c2->weight.value);

    // frozen parameter counts (input 32x32x1, embed dim 32)
    CHECK(a1.parameter_count() == 1792);
    CHECK(init_embedder("tiny-b", 1, 32, 1).parameter_count() == 4844);
    CHECK(init_embedder("tiny-c", 1, 32, 1).parameter_count() == 1832);
    CHECK(init_embedder("tiny-d", 1, 32, 1).parameter_count() == 4420);

    CHECK_THROWS_AS(init_embedder("tiny-z", 1, 32, 1), ValueError);

    // distinct presets disagree on essentially every image
    Rng rng(57);
    const SurrogateEmbedder b = init_embedder("tiny-b", 42, 32, 1);
    int below = 0;
    for (int i = 0; i < 20; ++i) {
        const ImageTensor img = random_image(rng, 32);
        if (cos_sim(embed(a1, img), embed(b, img)) < 0.99) ++below;
    }
    CHECK(below == 20);
}

TEST_CASE("embedder checkpoints round trip") {
    Rng rng(58);
    SurrogateEmbedder m = init_embedder("tiny-c", 99, 32, 1);
    const std::string path =
        (std::filesystem::temp_directory_path() / "vf_test_embedder.vfw1").string();
    save_embedder(path, m);
    const SurrogateEmbedder back = load_embedder(path);
    CHECK(back.preset == "tiny-c");
    CHECK(back.input_h == 32);
    CHECK(back.embed_dim == 32);

    // float32 quantization is idempotent: saving the loaded model again
    // reproduces identical embeddings
    const std::string path2 =
        (std::filesystem::temp_directory_path() / "vf_test_embedder2.vfw1").string();
    save_embedder(path2, back);
    const SurrogateEmbedder back2 = load_embedder(path2);
    const ImageTensor img = random_image(rng, 32);
    CHECK(embed(back, img) == embed(back2, img));
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("surrogate training pulls identities together") {
    // tiny synthetic task: 4 identities, strong geometry, few epochs
    Rng rng(59);
    std::vector<std::pair<int, ImageTensor>> data;
    for (int id = 0; id < 4; ++id) {
        for (int v = 0; v < 6; ++v) {
            ImageTensor img(16, 16, 1);
            Rng jitter(static_cast<std::uint64_t>(id * 100 + v));
            for (int y = 0; y < 16; ++y) {
                for (int x = 0; x < 16; ++x) {
                    const double base = ((x + 3 * id) % 8) < 4 ? 0.8 : 0.2;
                    img.at(y, x) = std::clamp(base + 0.05 * jitter.uniform(), 0.0, 1.0);
                }
            }
            data.emplace_back(id, img);
        }
    }
    SurrogateEmbedder m = init_embedder("tiny-a", 5, 16, 1);
    SurrogateTrainConfig cfg;
    cfg.epochs = 6;
    cfg.pairs_per_epoch = 200;
    cfg.seed = 3;
    SurrogateTrainStats stats;
    train_surrogate(m, data, cfg, &stats);
    REQUIRE(stats.epoch_loss.size() == 6);
    CHECK(stats.epoch_loss.back() < stats.epoch_loss.front());
}
