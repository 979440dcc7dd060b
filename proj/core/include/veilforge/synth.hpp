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

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "veilforge/tensor.hpp"

namespace veilforge {

// Procedural face-like images: an oval, two eyes, a mouth and a texture
// layer, all parameterized per identity. Variants perturb only pose and
// lighting, so identity geometry stays recoverable across variants.
struct SynthFaceSpec {
    int identities = 1;
    int variants_per_identity = 1;
    int image_size = 32;
    int channels = 1;
    std::uint64_t geometry_seed = 0;

    void validate() const;
};

// Deterministic per (spec); entries ordered by (identity, variant); values
// in [0,1]. Identity ids are dense 0..identities-1.
std::vector<std::pair<int, ImageTensor>> gen_dataset(const SynthFaceSpec& spec);

// Single image: identity `id`, variant `variant` of the spec's family.
ImageTensor gen_face(const SynthFaceSpec& spec, int id, int variant);

} // namespace veilforge
