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

#include "veilforge/optimizer.hpp"
#include "veilforge/synth.hpp"

namespace veilforge {

inline constexpr int kConfigSchemaVersion = 1;

// Pipeline configuration document (JSON, versioned via "schema_version").
// Missing keys take the documented defaults; unknown keys are rejected.
std::string to_json_text(const OptimizerConfig& cfg, int indent = 2);
OptimizerConfig optimizer_config_from_json(const std::string& text);
OptimizerConfig load_optimizer_config(const std::string& path);

std::string to_json_text(const SynthFaceSpec& spec, int indent = 2);
SynthFaceSpec synth_spec_from_json(const std::string& text);
SynthFaceSpec load_synth_spec(const std::string& path);

// Whether a config document pins "master_seed" (drives the CLI seed
// priority: flag > config > environment > default).
bool json_has_master_seed(const std::string& text);

// Anonymization run record: resolved config, per-iteration telemetry,
// final metrics. Timing lives in its own "timing" subtree so reruns are
// byte-identical after dropping it.
std::string report_json_text(const RunReport& report, const OptimizerConfig& cfg,
                             int indent = 2);

} // namespace veilforge
