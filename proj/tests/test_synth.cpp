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

#include "oracles.hpp"
#include "veilforge/image_io.hpp"
#include "veilforge/metrics.hpp"
#include "veilforge/rng.hpp"
#include "veilforge/synth.hpp"

using namespace veilforge;

TEST_CASE("single face is deterministic and matches its golden file") {
    SynthFaceSpec spec;
    spec.identities = 1;
    spec.variants_per_identity = 1;
    spec.geometry_seed = 123;
    const auto d1 = gen_dataset(spec);
    const auto d2 = gen_dataset(spec);
    REQUIRE(d1.size() == 1);
    CHECK(d1[0].first == 0);
    for (std::size_t i = 0; i < d1[0].second.size(); ++i) {
        CHECK(d1[0].second.data()[i] == d2[0].second.data()[i]);
    }
    for (double v : d1[0].second.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    const ImageTensor golden =
        load_vft1(std::string(VEILFORGE_GOLDEN_DIR) + "/synth_face_seed123.vft1");
    REQUIRE(golden.same_shape(d1[0].second));
    for (std::size_t i = 0; i < golden.size(); ++i) {
        CHECK(static_cast<float>(d1[0].second.data()[i]) ==
              static_cast<float>(golden.data()[i]));
    }
}

TEST_CASE("identity signal: within-identity SSIM beats cross-identity") {
    SynthFaceSpec spec;
    spec.identities = 50;
    spec.variants_per_identity = 5;
    spec.geometry_seed = 7;
    const auto data = gen_dataset(spec);

    double within = 0.0;
    int within_n = 0;
    for (int id = 0; id < 50; ++id) {
        for (int a = 0; a < 5; ++a) {
            for (int b = a + 1; b < 5; ++b) {
                within += ssim(data[id * 5 + a].second, data[id * 5 + b].second);
                ++within_n;
            }
        }
    }
    within /= within_n;

    Rng rng(71);
    double cross = 0.0;
    const int cross_n = 500;
    for (int i = 0; i < cross_n; ++i) {
        const auto a = static_cast<std::size_t>(rng.uniform() * data.size());
        auto b = static_cast<std::size_t>(rng.uniform() * data.size());
        while (data[b].first == data[a].first) b = (b + 5) % data.size();
        cross += ssim(data[a].second, data[b].second);
    }
    cross /= cross_n;

    CHECK(within - cross > 0.05);
}

TEST_CASE("spec validation") {
    SynthFaceSpec bad;
    bad.identities = 0;
    CHECK_THROWS(gen_dataset(bad));
    SynthFaceSpec tiny;
    tiny.image_size = 4;
    CHECK_THROWS(gen_dataset(tiny));
}
