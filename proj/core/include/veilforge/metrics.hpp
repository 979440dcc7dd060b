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

struct MetricReport {
    double ssim = 0.0;
    double psnr = 0.0; // +inf sentinel for identical images
    int window = 11;
    double k1 = 0.01, k2 = 0.03, luminance_range = 1.0;
};

// Mean local SSIM over 11x11 Gaussian-weighted windows (sigma 1.5),
// k1=0.01, k2=0.03, L=1. Windows reflect at borders; channels are computed
// on raw intensities and averaged.
double ssim(const ImageTensor& a, const ImageTensor& b);

// 10*log10(L^2 / MSE) with L=1; identical images return +infinity.
double psnr(const ImageTensor& a, const ImageTensor& b);

MetricReport evaluate_pair(const ImageTensor& reference, const ImageTensor& test);

} // namespace veilforge
