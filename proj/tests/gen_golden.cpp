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

// Regenerates the golden files the unit tests freeze against. Run manually
// from the repo root after an intentional contract change:
//   ./build/tests/veilforge_gen_golden tests/golden

#include <cstdio>
#include <string>

#include "veilforge/image_io.hpp"
#include "veilforge/masking.hpp"
#include "veilforge/noise.hpp"
#include "veilforge/optimizer.hpp"
#include "veilforge/rng.hpp"
#include "veilforge/synth.hpp"

using namespace veilforge;

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <golden-dir>\n", argv[0]);
        return 1;
    }
    const std::string dir = argv[1];

    {
        Rng rng(25);
        ImageTensor img(16, 16, 1);
        for (double& v : img.data()) v = rng.uniform();
        const RegionMask mask = detail_mask(img, 0.25);
        PaddingSpec spec;
        save_vft1(dir + "/fill_seed42.vft1", stochastic_fill(img, mask, spec, Rng(42)));
    }
    {
        NoiseSpec spec;
        spec.base_scale = 8.0;
        spec.seed = 7;
        save_vft1(dir + "/octave_seed7.vft1", octave_field(spec, 32, 32));
    }
    {
        SynthFaceSpec spec;
        spec.geometry_seed = 123;
        save_vft1(dir + "/synth_face_seed123.vft1", gen_face(spec, 0, 0));
    }
    {
        OptimizerConfig cfg;
        cfg.iters = 8;
        cfg.noise.base_scale = 8.0;
        cfg.entropy.bins = 64;
        cfg.entropy.bandwidth = 1.0 / 64.0;
        cfg.padding.window = 5;
        cfg.master_seed = 1234;
        cfg.keep_fraction = 0.999;
        cfg.highpass.mode = HighPassSpec::Mode::kFixed;
        cfg.highpass.omega_c = 0.0;

        SynthFaceSpec face;
        face.image_size = 32;
        face.geometry_seed = 31;
        save_vft1(dir + "/preprocess_allkeep.vft1",
                  preprocess(gen_face(face, 0, 0), cfg, Rng(9)));
    }
    std::printf("golden files written to %s\n", dir.c_str());
    return 0;
}
