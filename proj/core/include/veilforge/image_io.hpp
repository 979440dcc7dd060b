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

#include "veilforge/tensor.hpp"

namespace veilforge {

// 8-bit image I/O. Format is chosen by magic bytes on load and by extension
// on save (.png, .ppm for 3-channel, .pgm for 1-channel). Pixels map to [0,1]
// on load and back to 0-255 with rounding on save.
ImageTensor load_image(const std::string& path);
void save_image(const std::string& path, const ImageTensor& img);

// Lossless raw tensor format used for golden files:
//   magic "VFT1", then uint32 height, width, channels (little-endian),
//   then height*width*channels float32 values (little-endian, row-major,
//   channel-interleaved).
ImageTensor load_vft1(const std::string& path);
void save_vft1(const std::string& path, const ImageTensor& img);

} // namespace veilforge
