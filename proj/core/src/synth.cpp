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

#include "veilforge/synth.hpp"

#include <algorithm>
#include <cmath>

#include "veilforge/errors.hpp"
#include "veilforge/noise.hpp"
#include "veilforge/rng.hpp"

namespace veilforge {

namespace {

struct FaceParams {
    double cx, cy, rx, ry;   // face oval, normalized coordinates
    double skin;             // oval intensity
    double eye_y, eye_dx, eye_r, eye_v;
    double mouth_y, mouth_rx, mouth_ry, mouth_v;
    double background;
    std::uint64_t texture_seed;
    // variant-only modifiers
    double shift_x = 0.0, shift_y = 0.0, brightness = 1.0, jitter_amp = 0.0;
    std::uint64_t jitter_seed = 0;
};

double uniform_in(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform();
}

FaceParams identity_params(const SynthFaceSpec& spec, int id) {
    Rng rng = Rng(spec.geometry_seed).substream("identity", static_cast<std::uint64_t>(id));
    FaceParams p{};
    p.cx = uniform_in(rng, 0.44, 0.56);
    p.cy = uniform_in(rng, 0.46, 0.54);
    p.rx = uniform_in(rng, 0.26, 0.40);
    p.ry = uniform_in(rng, 0.32, 0.46);
    p.skin = uniform_in(rng, 0.45, 0.75);
    p.eye_y = p.cy - uniform_in(rng, 0.08, 0.18);
    p.eye_dx = uniform_in(rng, 0.09, 0.18);
    p.eye_r = uniform_in(rng, 0.028, 0.055);
    p.eye_v = uniform_in(rng, 0.02, 0.18);
    p.mouth_y = p.cy + uniform_in(rng, 0.12, 0.24);
    p.mouth_rx = uniform_in(rng, 0.08, 0.16);
    p.mouth_ry = uniform_in(rng, 0.02, 0.045);
    p.mouth_v = uniform_in(rng, 0.10, 0.35);
    p.background = uniform_in(rng, 0.08, 0.22);
    p.texture_seed = rng.next_u64();
    return p;
}

void apply_variant(FaceParams& p, const SynthFaceSpec& spec, int id, int variant) {
    Rng rng = Rng(spec.geometry_seed)
                  .substream("variant", (static_cast<std::uint64_t>(id) << 20) |
                                            static_cast<std::uint64_t>(variant));
    p.shift_x = uniform_in(rng, -0.03, 0.03);
    p.shift_y = uniform_in(rng, -0.03, 0.03);
    p.brightness = uniform_in(rng, 0.92, 1.08);
    p.jitter_amp = uniform_in(rng, 0.01, 0.03);
    p.jitter_seed = rng.next_u64();
}

inline double ellipse_coverage(double u, double v, double cx, double cy, double rx, double ry) {
    const double du = (u - cx) / rx;
    const double dv = (v - cy) / ry;
    const double d = du * du + dv * dv - 1.0;
    // soft edge ~0.12 wide in the squared-distance metric
    const double t = std::clamp(0.5 - d / 0.24, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

} // namespace

void SynthFaceSpec::validate() const {
    if (identities < 1 || variants_per_identity < 1) {
        throw ValueError("SynthFaceSpec: identities and variants must be >= 1");
    }
    if (image_size < 8) throw ValueError("SynthFaceSpec: image_size must be >= 8");
    if (channels != 1 && channels != 3) throw ValueError("SynthFaceSpec: channels must be 1 or 3");
}

ImageTensor gen_face(const SynthFaceSpec& spec, int id, int variant) {
    spec.validate();
    FaceParams p = identity_params(spec, id);
    apply_variant(p, spec, id, variant);

    const int n = spec.image_size;
    ImageTensor img(n, n, spec.channels);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double u = (x + 0.5) / n - p.shift_x;
            const double v = (y + 0.5) / n - p.shift_y;

            double value = p.background;
            const double face = ellipse_coverage(u, v, p.cx, p.cy, p.rx, p.ry);
            value = value + (p.skin - value) * face;

            const double eye_l = ellipse_coverage(u, v, p.cx - p.eye_dx, p.eye_y, p.eye_r, p.eye_r);
            const double eye_r = ellipse_coverage(u, v, p.cx + p.eye_dx, p.eye_y, p.eye_r, p.eye_r);
            value = value + (p.eye_v - value) * std::max(eye_l, eye_r);

            const double mouth = ellipse_coverage(u, v, p.cx, p.mouth_y, p.mouth_rx, p.mouth_ry);
            value = value + (p.mouth_v - value) * mouth;

            // identity texture plus small variant jitter
            value += 0.05 * lattice_noise(u * 9.0, v * 9.0, p.texture_seed) * face;
            value += p.jitter_amp * lattice_noise(u * 13.0, v * 13.0, p.jitter_seed);

            value *= p.brightness;
            value = std::clamp(value, 0.0, 1.0);
            for (int c = 0; c < spec.channels; ++c) {
                // mild channel tint keeps RGB variants non-degenerate
                const double tint = spec.channels == 3 ? 1.0 - 0.06 * c : 1.0;
                img.at(y, x, c) = std::clamp(value * tint, 0.0, 1.0);
            }
        }
    }
    return img;
}

std::vector<std::pair<int, ImageTensor>> gen_dataset(const SynthFaceSpec& spec) {
    spec.validate();
    std::vector<std::pair<int, ImageTensor>> out;
    out.reserve(static_cast<std::size_t>(spec.identities) * spec.variants_per_identity);
    for (int id = 0; id < spec.identities; ++id) {
        for (int var = 0; var < spec.variants_per_identity; ++var) {
            out.emplace_back(id, gen_face(spec, id, var));
        }
    }
    return out;
}

} // namespace veilforge
