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
#include "veilforge/nn/checkpoint.hpp"
#include "veilforge/recon.hpp"
#include "veilforge/rng.hpp"
#include "veilforge/synth.hpp"

using namespace veilforge;

TEST_CASE("recon net preserves dimensions and is deterministic") {
    ReconNet net(1, 4, 77);
    Rng rng(81);
    ImageTensor img(16, 16, 1);
    for (double& v : img.data()) v = rng.uniform();
    const ImageTensor r1 = net.reconstruct(img);
    const ImageTensor r2 = net.reconstruct(img);
    REQUIRE(r1.same_shape(img));
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1.data()[i] == r2.data()[i]);
}

TEST_CASE("zero epochs leaves the net unchanged") {
    ReconNet net(1, 4, 78);
    ReconNet untouched = net;
    SynthFaceSpec spec;
    spec.identities = 2;
    spec.variants_per_identity = 2;
    const auto data = gen_dataset(spec);
    std::vector<std::pair<ImageTensor, ImageTensor>> pairs;
    for (const auto& [id, img] : data) pairs.emplace_back(img, img);

    ReconTrainConfig cfg;
    cfg.epochs = 0;
    train_recon(pairs, net, cfg);
    auto a = net.parameters();
    auto b = untouched.parameters();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value == b[i]->value);
}

TEST_CASE("identity task trains to near-zero MSE through the skips") {
    SynthFaceSpec spec;
    spec.identities = 12;
    spec.variants_per_identity = 4;
    spec.geometry_seed = 5;
    const auto data = gen_dataset(spec);
    std::vector<std::pair<ImageTensor, ImageTensor>> pairs;
    for (const auto& [id, img] : data) pairs.emplace_back(img, img);

    ReconNet net(1, 8, 79);
    ReconTrainConfig cfg;
    cfg.epochs = 50;
    cfg.lr = 3e-3; // identity regression converges fast at this scale
    cfg.seed = 11;
    cfg.threads = 2;
    ReconTrainReport report;
    train_recon(pairs, net, cfg, &report);

    REQUIRE(report.train_mse.size() == 50);
    CHECK(report.train_mse.back() < report.train_mse.front());
    CHECK(report.train_mse.back() < 1e-3);
}

TEST_CASE("training is bit-stable across runs and thread counts") {
    SynthFaceSpec spec;
    spec.identities = 4;
    spec.variants_per_identity = 2;
    const auto data = gen_dataset(spec);
    std::vector<std::pair<ImageTensor, ImageTensor>> pairs;
    for (const auto& [id, img] : data) pairs.emplace_back(box_blur(img, 3), img);

    auto run = [&](int threads) {
        ReconNet net(1, 4, 80);
        ReconTrainConfig cfg;
        cfg.epochs = 3;
        cfg.seed = 21;
        cfg.threads = threads;
        ReconTrainReport rep;
        train_recon(pairs, net, cfg, &rep);
        return rep.train_mse.back();
    };
    const double a = run(1);
    const double b = run(1);
    const double c = run(2);
    CHECK(a == b);
    CHECK(std::abs(a - c) <= 1e-9);
}

TEST_CASE("plateau schedule halves the learning rate") {
    SynthFaceSpec spec;
    spec.identities = 3;
    spec.variants_per_identity = 2;
    const auto data = gen_dataset(spec);
    std::vector<std::pair<ImageTensor, ImageTensor>> pairs;
    for (const auto& [id, img] : data) pairs.emplace_back(img, img);

    ReconNet net(1, 4, 81);
    ReconTrainConfig cfg;
    cfg.epochs = 6;
    cfg.lr = 1e-20; // too small to move any weight: validation never improves
    cfg.plateau_patience = 2;
    cfg.seed = 22;
    ReconTrainReport rep;
    train_recon(pairs, net, cfg, &rep);
    REQUIRE(rep.lr.size() == 6);
    CHECK(rep.lr[0] == 1e-20);
    CHECK(rep.lr[3] == 1e-20);       // stall count reaches patience after epoch 3
    CHECK(rep.lr[4] == 0.5e-20);     // halved before epoch 4
}

TEST_CASE("recon checkpoints round trip") {
    ReconNet net(1, 4, 82);
    const std::string path =
        (std::filesystem::temp_directory_path() / "vf_test_recon.vfw1").string();
    save_recon(path, net);
    const ReconNet back = load_recon(path);
    CHECK(back.in_channels() == 1);
    CHECK(back.base_channels() == 4);

    Rng rng(83);
    ImageTensor img(16, 16, 1);
    for (double& v : img.data()) v = rng.uniform();
    // weights quantize to float32 in the file; a second round trip is exact
    const std::string path2 =
        (std::filesystem::temp_directory_path() / "vf_test_recon2.vfw1").string();
    save_recon(path2, back);
    const ReconNet back2 = load_recon(path2);
    const ImageTensor r1 = back.reconstruct(img);
    const ImageTensor r2 = back2.reconstruct(img);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1.data()[i] == r2.data()[i]);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}
