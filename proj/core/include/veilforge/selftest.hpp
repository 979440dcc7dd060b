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
#include <vector>

namespace veilforge {

// Numerical invariants runnable from the CLI: DFT round-trip and Parseval,
// the direct-summation DFT definition, finite-difference validation of
// every autodiff layer and of the entropy gradient, and SSIM against a
// direct-formula evaluation. Each check carries its own independent
// reference implementation.
struct SelfTestReport {
    struct Check {
        std::string name;
        bool passed = false;
        std::string detail; // worst error, threshold
    };
    std::vector<Check> checks;

    bool all_passed() const {
        for (const auto& c : checks) {
            if (!c.passed) return false;
        }
        return true;
    }
};

SelfTestReport run_selftest();

} // namespace veilforge
