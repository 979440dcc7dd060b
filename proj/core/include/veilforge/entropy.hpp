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

#include "veilforge/tensor.hpp"

namespace veilforge {

// Intensity-histogram entropy configuration. Multi-channel images pool all
// channel values into one joint 1-D histogram.
//
// The soft variant smooths each value's unit mass over nearby bins with a
// Gaussian kernel of sigma = bandwidth / 8, bandwidth in intensity units.
// The kernel is narrow on purpose: a bin-centered value keeps essentially
// all of its mass, values near a bin edge split smoothly between the two
// bins, and the smoothed entropy of a typical image stays within 0.1 bits
// of the hard-binned value at the default bandwidth. Bin distance is
// circular, which makes the uniform histogram an exact maximal-entropy
// fixed point of the smoothing at every bandwidth.
struct EntropySpec {
    int bins = 256;
    double bandwidth = 1.0 / 256.0; // intensity units, in (0, 1)
    enum class LogBase { kTwo, kE };
    LogBase log_base = LogBase::kTwo;

    void validate() const;
};

// Shannon entropy of the hard-binned histogram; 0*log(0) := 0. Range
// [0, log(bins)]. Pixels outside [0,1] are an error.
double hard_entropy(const ImageTensor& img, const EntropySpec& spec);

// Entropy of the kernel-smoothed bin probabilities. Converges to
// hard_entropy as bandwidth -> 0 for bin-centered images.
double soft_entropy(const ImageTensor& img, const EntropySpec& spec);

// Analytic per-pixel derivative of soft_entropy.
ImageTensor soft_entropy_grad(const ImageTensor& img, const EntropySpec& spec);

} // namespace veilforge
