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

#include "oracles.hpp"
#include "veilforge/config.hpp"
#include "veilforge/image_io.hpp"
#include "veilforge/metrics.hpp"
#include "veilforge/optimizer.hpp"
#include "veilforge/synth.hpp"

using namespace veilforge;

namespace {

OptimizerConfig fast_config() {
    OptimizerConfig cfg;
    cfg.iters = 8;
    cfg.noise.base_scale = 8.0;
    cfg.entropy.bins = 64;
    cfg.entropy.bandwidth = 1.0 / 64.0;
    cfg.padding.window = 5;
    cfg.master_seed = 1234;
    return cfg;
}

EnsembleSpec small_ensemble(int input_size) {
    EnsembleSpec ens;
    ens.members.push_back(init_embedder("tiny-a", 1, input_size, 1));
    ens.members.push_back(init_embedder("tiny-c", 2, input_size, 1));
    ens.betas = {200.0, 200.0};
    return ens;
}

ImageTensor test_face(int size = 32) {
    SynthFaceSpec spec;
    spec.image_size = size;
    spec.geometry_seed = 31;
    return gen_face(spec, 0, 0);
}

} // namespace

TEST_CASE("preprocess of a mid-gray constant image stays constant") {
    // constant image: the spectrum collapses to DC, the high-pass removes
    // it, the degenerate rescale maps to 0.5, and sigma = 0 fill draws the
    // local mean. At 0.5 the kept and filled values coincide.
    OptimizerConfig cfg = fast_config();
    const ImageTensor flat = ImageTensor::filled(16, 16, 1, 0.5);
    const ImageTensor x0 = preprocess(flat, cfg, Rng(7));
    for (double v : x0.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));

    // design reading: fill statistics come from the original image, so a
    // non-0.5 constant yields exactly the two values {0.5, c}
    const ImageTensor c3 = ImageTensor::filled(16, 16, 1, 0.3);
    const ImageTensor x0c = preprocess(c3, cfg, Rng(7));
    for (double v : x0c.data()) {
        const bool ok = std::abs(v - 0.5) <= 1e-12 || std::abs(v - 0.3) <= 1e-12;
        CHECK(ok);
    }
}

TEST_CASE("preprocess is deterministic and matches its golden file") {
    OptimizerConfig cfg = fast_config();
    cfg.keep_fraction = 0.999; // ceil -> everything kept, fill is a no-op
    cfg.highpass.mode = HighPassSpec::Mode::kFixed;
    cfg.highpass.omega_c = 0.0; // DC removal only

    const ImageTensor x = test_face();
    const ImageTensor a = preprocess(x, cfg, Rng(9));
    const ImageTensor b = preprocess(x, cfg, Rng(9));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);

    const ImageTensor golden =
        load_vft1(std::string(VEILFORGE_GOLDEN_DIR) + "/preprocess_allkeep.vft1");
    REQUIRE(golden.same_shape(a));
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(static_cast<float>(a.data()[i]) == static_cast<float>(golden.data()[i]));
    }
}

TEST_CASE("null step: alpha 0 returns the iterate unchanged") {
    OptimizerConfig cfg = fast_config();
    cfg.alpha_override = 0.0;
    const ImageTensor x = test_face();
    const ImageTensor x_t = clamp01(box_blur(x, 3));
    const ImageTensor g0(x.height(), x.width(), x.channels());
    const EnsembleSpec ens = small_ensemble(32);

    const StepResult r = step(x_t, x, g0, 0, cfg, ens);
    for (std::size_t i = 0; i < x_t.size(); ++i) CHECK(r.x_next.data()[i] == x_t.data()[i]);
}

TEST_CASE("pure normalized-gradient ascent increases the objective") {
    OptimizerConfig cfg = fast_config();
    cfg.momentum = 0.0;
    cfg.norm_p = NormP::kL1;
    cfg.alpha_override = 1e-3;
    const EnsembleSpec ens = small_ensemble(32);

    const ImageTensor x = test_face();
    // start away from x, interior values so clamping cannot interfere
    ImageTensor x_t = x;
    for (double& v : x_t.data()) v = 0.3 + 0.4 * (1.0 - v);
    const ImageTensor ones = ImageTensor::filled(32, 32, 1, 1.0);
    const ImageTensor g0(32, 32, 1);

    auto objective = [&](const ImageTensor& img) {
        const double rec = recognition_loss_grad(ens, x, img).first;
        return rec + cfg.gamma * soft_entropy(img, cfg.entropy);
    };
    const double before = objective(x_t);
    const StepResult r = step_with_field(x_t, x, g0, ones, cfg, ens);
    CHECK(objective(r.x_next) > before);
    CHECK(r.stats.total_loss == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("gamma 0 isolates the similarity term") {
    OptimizerConfig cfg = fast_config();
    cfg.gamma = 0.0;
    const EnsembleSpec ens = small_ensemble(32);
    const ImageTensor x = test_face();
    const ImageTensor g0(32, 32, 1);
    const ImageTensor ones = ImageTensor::filled(32, 32, 1, 1.0);

    const StepResult r = step_with_field(x, x, g0, ones, cfg, ens);
    CHECK(r.stats.entropy_term == 0.0);
    CHECK(r.stats.total_loss == r.stats.recognition_loss);
    // X_t = X sits at the cosine maximum: gradient norm vanishes and the
    // zero-norm path reports it
    CHECK(r.stats.grad_norm <= 1e-12);
}

TEST_CASE("anonymize with zero iterations returns the preprocessed image") {
    OptimizerConfig cfg = fast_config();
    cfg.iters = 0;
    const EnsembleSpec ens = small_ensemble(32);
    const ImageTensor x = test_face();
    const auto [xp, report] = anonymize(x, cfg, ens);
    const ImageTensor x0 = preprocess(x, cfg, Rng(cfg.master_seed));
    for (std::size_t i = 0; i < xp.size(); ++i) CHECK(xp.data()[i] == x0.data()[i]);
    CHECK(report.iterations.empty());
}

TEST_CASE("anonymize is deterministic and seed-sensitive") {
    OptimizerConfig cfg = fast_config();
    const EnsembleSpec ens = small_ensemble(32);
    const ImageTensor x = test_face();

    const auto [x1, r1] = anonymize(x, cfg, ens);
    const auto [x2, r2] = anonymize(x, cfg, ens);
    for (std::size_t i = 0; i < x1.size(); ++i) CHECK(x1.data()[i] == x2.data()[i]);
    REQUIRE(r1.iterations.size() == r2.iterations.size());
    for (std::size_t i = 0; i < r1.iterations.size(); ++i) {
        CHECK(r1.iterations[i].total_loss == r2.iterations[i].total_loss);
        CHECK(r1.iterations[i].grad_norm == r2.iterations[i].grad_norm);
    }
    CHECK(r1.iterations.size() == static_cast<std::size_t>(cfg.iters));

    OptimizerConfig other = cfg;
    other.master_seed = 4321;
    const auto [x3, r3] = anonymize(x, other, ens);
    CHECK(ssim(x1, x3) < 0.9); // stochastic mapping: different seeds diverge
}

TEST_CASE("per-step change respects the max-norm budget bound") {
    OptimizerConfig cfg = fast_config();
    cfg.norm_p = NormP::kLInf; // normalized gradient has max-norm exactly 1
    cfg.iters = 6;
    const EnsembleSpec ens = small_ensemble(32);
    const ImageTensor x = test_face();

    const double amplitude = cfg.noise.amplitude_bound();
    const double alpha = cfg.alpha();

    const Rng rng(cfg.master_seed);
    ImageTensor x_t = preprocess(x, cfg, rng);
    ImageTensor g(32, 32, 1);
    double momentum_sum = 0.0; // sum_{j<=t} mu^j
    double mu_pow = 1.0;
    for (int t = 0; t < cfg.iters; ++t) {
        momentum_sum += mu_pow;
        mu_pow *= cfg.momentum;
        OptimizerConfig local = cfg;
        const StepResult r = step(x_t, x, g, t, local, ens);
        const double bound = alpha * amplitude * momentum_sum * (1.0 + 1e-12);
        CHECK(max_abs(r.x_next - x_t) <= bound);
        x_t = r.x_next;
        g = r.momentum_next;
    }
}

TEST_CASE("ablations produce measurably different outputs") {
    OptimizerConfig cfg = fast_config();
    const EnsembleSpec ens = small_ensemble(32);
    const ImageTensor x = test_face();
    const auto [full, rep] = anonymize(x, cfg, ens);

    for (int which = 0; which < 3; ++which) {
        OptimizerConfig ab = cfg;
        ab.ablate.drop_spectral = which == 0;
        ab.ablate.drop_fill = which == 1;
        ab.ablate.drop_noise_entropy = which == 2;
        const auto [out, r] = anonymize(x, ab, ens);
        CHECK(ssim(full, out) < 0.99);
    }
}

TEST_CASE("batch anonymization seed policies") {
    OptimizerConfig cfg = fast_config();
    cfg.iters = 3;
    const EnsembleSpec ens = small_ensemble(32);
    std::vector<ImageTensor> images;
    SynthFaceSpec spec;
    spec.image_size = 32;
    spec.geometry_seed = 77;
    for (int i = 0; i < 3; ++i) images.push_back(gen_face(spec, i, 0));

    // fixed policy: each image uses the same master seed; rerun equality
    const auto fixed1 = anonymize_batch(images, cfg, ens, SeedPolicy::kFixed, 2);
    const auto fixed2 = anonymize_batch(images, cfg, ens, SeedPolicy::kFixed, 1);
    for (std::size_t i = 0; i < fixed1.size(); ++i) {
        for (std::size_t j = 0; j < fixed1[i].size(); ++j) {
            CHECK(fixed1[i].data()[j] == fixed2[i].data()[j]);
        }
    }

    // per-image policy: identical input images map to different outputs
    std::vector<ImageTensor> twice{images[0], images[0]};
    const auto stoch = anonymize_batch(twice, cfg, ens, SeedPolicy::kPerImage, 2);
    CHECK(ssim(stoch[0], stoch[1]) < 0.999);
}
