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

#include "veilforge/config.hpp"
#include "veilforge/embedder.hpp"
#include "veilforge/errors.hpp"

using namespace veilforge;

TEST_CASE("optimizer config survives a JSON round trip") {
    OptimizerConfig cfg;
    cfg.iters = 42;
    cfg.epsilon_budget = 5.0;
    cfg.momentum = 0.7;
    cfg.gamma = 12.5;
    cfg.norm_p = NormP::kLInf;
    cfg.keep_fraction = 0.35;
    cfg.master_seed = 99;
    cfg.ablate.drop_fill = true;
    cfg.noise.octaves = 3;
    cfg.noise.base_scale = 12.0;
    cfg.entropy.bins = 128;
    cfg.highpass.mode = HighPassSpec::Mode::kFixed;
    cfg.highpass.omega_c = 6.5;
    cfg.padding.kappa = 2.0;

    const OptimizerConfig back = optimizer_config_from_json(to_json_text(cfg));
    CHECK(back.iters == 42);
    CHECK(back.epsilon_budget == 5.0);
    CHECK(back.momentum == 0.7);
    CHECK(back.gamma == 12.5);
    CHECK(back.norm_p == NormP::kLInf);
    CHECK(back.keep_fraction == 0.35);
    CHECK(back.master_seed == 99);
    CHECK(back.ablate.drop_fill);
    CHECK(!back.ablate.drop_spectral);
    CHECK(back.noise.octaves == 3);
    CHECK(back.noise.base_scale == 12.0);
    CHECK(back.entropy.bins == 128);
    CHECK(back.highpass.mode == HighPassSpec::Mode::kFixed);
    CHECK(back.highpass.omega_c == 6.5);
    CHECK(back.padding.kappa == 2.0);

    // serialization is stable: text(parse(text)) == text
    const std::string text = to_json_text(cfg);
    CHECK(to_json_text(optimizer_config_from_json(text)) == text);
}

TEST_CASE("alpha derivation and override") {
    OptimizerConfig cfg;
    CHECK(cfg.alpha() == doctest::Approx(100.0 * 3.0 / 100.0 / 255.0));
    cfg.alpha_override = 0.5;
    CHECK(cfg.alpha() == 0.5);
    const OptimizerConfig back = optimizer_config_from_json(to_json_text(cfg));
    REQUIRE(back.alpha_override.has_value());
    CHECK(*back.alpha_override == 0.5);
}

TEST_CASE("unknown keys and bad values are rejected") {
    CHECK_THROWS_AS(optimizer_config_from_json(R"({"itters": 10})"), ValueError);
    CHECK_THROWS_AS(optimizer_config_from_json(R"({"schema_version": 2})"), ValueError);
    CHECK_THROWS_AS(optimizer_config_from_json(R"({"norm_p": 3})"), ValueError);
    CHECK_THROWS_AS(optimizer_config_from_json(R"({"ablate": ["Q"]})"), ValueError);
    CHECK_THROWS_AS(optimizer_config_from_json("not json"), ValueError);
    CHECK(json_has_master_seed(R"({"master_seed": 5})"));
    CHECK(!json_has_master_seed(R"({"iters": 5})"));
}

TEST_CASE("synth spec round trip") {
    SynthFaceSpec spec;
    spec.identities = 10;
    spec.variants_per_identity = 3;
    spec.image_size = 48;
    spec.geometry_seed = 17;
    const SynthFaceSpec back = synth_spec_from_json(to_json_text(spec));
    CHECK(back.identities == 10);
    CHECK(back.variants_per_identity == 3);
    CHECK(back.image_size == 48);
    CHECK(back.geometry_seed == 17);
}

TEST_CASE("run reports isolate timing and echo the config") {
    RunReport report;
    report.master_seed = 7;
    report.iterations.push_back({1.0, 2.0, 3.0, 0.5, false});
    report.final_hard_entropy = 4.2;
    report.final_ssim = 0.25;
    report.member_cosine = {0.9, 0.8};
    report.holdout_index = 1;
    report.wall_seconds = 12.5;

    OptimizerConfig cfg;
    const std::string text = report_json_text(report, cfg);
    CHECK(text.find("\"timing\"") != std::string::npos);
    CHECK(text.find("\"wall_seconds\"") != std::string::npos);
    CHECK(text.find("\"holdout_cosine\": 0.8") != std::string::npos);
    CHECK(text.find("\"schema_version\"") != std::string::npos);

    // identical runs modulo timing produce identical text
    RunReport t2 = report;
    t2.wall_seconds = 99.0;
    const std::string a = report_json_text(report, cfg);
    const std::string b = report_json_text(t2, cfg);
    const auto strip = [](std::string s) {
        const auto pos = s.find("\"timing\"");
        return s.substr(0, pos);
    };
    CHECK(strip(a) == strip(b));
    CHECK(a != b);
}
