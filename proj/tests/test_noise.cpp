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
#include "veilforge/errors.hpp"
#include "veilforge/image_io.hpp"
#include "veilforge/noise.hpp"
#include "veilforge/rng.hpp"

using namespace veilforge;

TEST_CASE("lattice noise vanishes on the integer lattice") {
    for (std::uint64_t seed : {0ull, 1ull, 0xdeadbeefull}) {
        CHECK(lattice_noise(3.0, 7.0, seed) == 0.0);
        CHECK(lattice_noise(-5.0, 0.0, seed) == 0.0);
        CHECK(lattice_noise(0.0, 0.0, seed) == 0.0);
    }
}

TEST_CASE("lattice noise stays in [-1,1] and is seed sensitive") {
    Rng rng(31);
    int differing = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const double x = rng.uniform() * 64.0 + 0.25; // avoid exact lattice points
        const double y = rng.uniform() * 64.0 + 0.25;
        const double v1 = lattice_noise(x, y, 7);
        const double v2 = lattice_noise(x, y, 8);
        CHECK(v1 >= -1.0);
        CHECK(v1 <= 1.0);
        if (v1 != v2) ++differing;
    }
    CHECK(differing >= static_cast<int>(0.99 * n));

    // wider range scan
    for (int i = 0; i < 100000; ++i) {
        const double v = lattice_noise(rng.uniform() * 1000.0 - 500.0,
                                       rng.uniform() * 1000.0 - 500.0, 99);
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("octave field basics") {
    NoiseSpec one;
    one.octaves = 1;
    one.base_scale = 1.0;
    one.seed = 5;
    const ImageTensor f = octave_field(one, 8, 8);
    for (double v : f.data()) CHECK(v == 0.0); // integer pixels are lattice points

    NoiseSpec three;
    three.octaves = 3;
    three.persistence = 0.5;
    three.base_scale = 4.0;
    three.seed = 6;
    const ImageTensor g = octave_field(three, 32, 32);
    CHECK(max_abs(g) <= 1.75); // 1 + 0.5 + 0.25

    NoiseSpec bad;
    bad.octaves = 0;
    CHECK_THROWS_AS(octave_field(bad, 4, 4), ValueError);
}

TEST_CASE("octave field is golden-file stable and near zero mean") {
    NoiseSpec spec;
    spec.seed = 7;
    const ImageTensor field = octave_field(spec, 112, 112);
    CHECK(std::abs(mean(field)) <= 0.02);

    const ImageTensor small = octave_field(NoiseSpec{.octaves = 4,
                                                     .persistence = 0.5,
                                                     .lacunarity = 2.0,
                                                     .base_scale = 8.0,
                                                     .seed = 7},
                                           32, 32);
    const ImageTensor golden = load_vft1(std::string(VEILFORGE_GOLDEN_DIR) + "/octave_seed7.vft1");
    REQUIRE(golden.same_shape(small));
    for (std::size_t i = 0; i < small.size(); ++i) {
        CHECK(static_cast<float>(small.data()[i]) == static_cast<float>(golden.data()[i]));
    }
}

TEST_CASE("amplitude bound holds on a dense grid") {
    NoiseSpec spec;
    spec.octaves = 5;
    spec.persistence = 0.7;
    spec.base_scale = 3.0;
    spec.seed = 11;
    const double bound = spec.amplitude_bound();
    const ImageTensor f = octave_field(spec, 128, 128);
    CHECK(max_abs(f) <= bound);
}

TEST_CASE("higher octaves get rougher") {
    double prev = -1.0;
    for (int k = 0; k < 4; ++k) {
        NoiseSpec spec;
        spec.octaves = 1;
        spec.base_scale = 16.0 / std::pow(2.0, k); // octave k in isolation
        spec.seed = 17;
        const ImageTensor f = octave_field(spec, 128, 128);
        double rough = 0.0;
        for (int y = 0; y < 128; ++y) {
            for (int x = 1; x < 128; ++x) rough += std::abs(f.at(y, x) - f.at(y, x - 1));
        }
        rough /= 128.0 * 127.0;
        CHECK(rough > prev);
        prev = rough;
    }
}

TEST_CASE("temporal fields decorrelate across iterations") {
    NoiseSpec spec;
    spec.seed = 13;
    const ImageTensor f0 = temporal_field(spec, 0, 112, 112);
    const ImageTensor f0b = temporal_field(spec, 0, 112, 112);
    for (std::size_t i = 0; i < f0.size(); ++i) CHECK(f0.data()[i] == f0b.data()[i]);

    const ImageTensor f1 = temporal_field(spec, 1, 112, 112);
    std::vector<double> a(f0.data().begin(), f0.data().end());
    std::vector<double> b(f1.data().begin(), f1.data().end());
    CHECK(std::abs(oracles::pearson(a, b)) < 0.1);
}

TEST_CASE("single seed bit flips change nearly every value") {
    NoiseSpec s1;
    s1.seed = 0x1234;
    NoiseSpec s2 = s1;
    s2.seed = s1.seed ^ (1ull << 17);
    const ImageTensor f1 = octave_field(s1, 64, 64);
    const ImageTensor f2 = octave_field(s2, 64, 64);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < f1.size(); ++i) {
        if (std::abs(f1.data()[i] - f2.data()[i]) > 1e-6) ++changed;
    }
    CHECK(static_cast<double>(changed) >= 0.95 * static_cast<double>(f1.size()));
}
