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

#include <string>

#include "veilforge/embedder.hpp"
#include "veilforge/recon.hpp"

namespace veilforge {

// Weight checkpoint format VFW1 (little-endian):
//   magic "VFW1", u32 format version,
//   length-prefixed kind ("embedder" | "recon") and name strings,
//   i32 meta[6], u64 init seed,
//   u32 layer count, then per layer: u32 type tag, i32 dims[3],
//   and for parameterized layers a u64-length-prefixed float32 blob for
//   the weights and another for the biases.
void save_embedder(const std::string& path, const SurrogateEmbedder& model);
SurrogateEmbedder load_embedder(const std::string& path);

void save_recon(const std::string& path, const ReconNet& net);
ReconNet load_recon(const std::string& path);

} // namespace veilforge
