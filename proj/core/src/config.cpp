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

#include "veilforge/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "veilforge/errors.hpp"

namespace veilforge {

namespace {

using json = nlohmann::ordered_json;

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValueError(std::string("config: invalid JSON: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known, const char* where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.contains(it.key())) {
            throw ValueError(std::string("config: unknown key '") + it.key() + "' in " + where);
        }
    }
}

json noise_to_json(const NoiseSpec& n) {
    return json{{"octaves", n.octaves},
                {"persistence", n.persistence},
                {"lacunarity", n.lacunarity},
                {"base_scale", n.base_scale},
                {"seed", n.seed}};
}

NoiseSpec noise_from_json(const json& j) {
    reject_unknown_keys(j, {"octaves", "persistence", "lacunarity", "base_scale", "seed"}, "noise");
    NoiseSpec n;
    n.octaves = j.value("octaves", n.octaves);
    n.persistence = j.value("persistence", n.persistence);
    n.lacunarity = j.value("lacunarity", n.lacunarity);
    n.base_scale = j.value("base_scale", n.base_scale);
    n.seed = j.value("seed", n.seed);
    return n;
}

json entropy_to_json(const EntropySpec& e) {
    return json{{"bins", e.bins},
                {"bandwidth", e.bandwidth},
                {"log_base", e.log_base == EntropySpec::LogBase::kTwo ? "2" : "e"}};
}

EntropySpec entropy_from_json(const json& j) {
    reject_unknown_keys(j, {"bins", "bandwidth", "log_base"}, "entropy");
    EntropySpec e;
    e.bins = j.value("bins", e.bins);
    e.bandwidth = j.value("bandwidth", e.bandwidth);
    const std::string base = j.value("log_base", "2");
    if (base == "2") {
        e.log_base = EntropySpec::LogBase::kTwo;
    } else if (base == "e") {
        e.log_base = EntropySpec::LogBase::kE;
    } else {
        throw ValueError("config: entropy.log_base must be \"2\" or \"e\"");
    }
    return e;
}

json highpass_to_json(const HighPassSpec& h) {
    if (h.mode == HighPassSpec::Mode::kFixed) {
        return json{{"mode", "fixed"}, {"omega_c", h.omega_c}};
    }
    return json{{"mode", "energy_fraction"}, {"energy_fraction", h.energy_fraction}};
}

HighPassSpec highpass_from_json(const json& j) {
    reject_unknown_keys(j, {"mode", "omega_c", "energy_fraction"}, "highpass");
    HighPassSpec h;
    const std::string mode = j.value("mode", "energy_fraction");
    if (mode == "fixed") {
        h.mode = HighPassSpec::Mode::kFixed;
        h.omega_c = j.value("omega_c", 0.0);
    } else if (mode == "energy_fraction") {
        h.mode = HighPassSpec::Mode::kEnergyFraction;
        h.energy_fraction = j.value("energy_fraction", 0.5);
    } else {
        throw ValueError("config: highpass.mode must be \"fixed\" or \"energy_fraction\"");
    }
    return h;
}

json padding_to_json(const PaddingSpec& p) {
    return json{{"kappa", p.kappa}, {"window", p.window}};
}

PaddingSpec padding_from_json(const json& j) {
    reject_unknown_keys(j, {"kappa", "window"}, "padding");
    PaddingSpec p;
    p.kappa = j.value("kappa", p.kappa);
    p.window = j.value("window", p.window);
    return p;
}

json ablate_to_json(const AblationSet& a) {
    json arr = json::array();
    if (a.drop_spectral) arr.push_back("F");
    if (a.drop_fill) arr.push_back("C");
    if (a.drop_noise_entropy) arr.push_back("P");
    return arr;
}

AblationSet ablate_from_json(const json& j) {
    AblationSet a;
    for (const auto& item : j) {
        const std::string s = item.get<std::string>();
        if (s == "F") {
            a.drop_spectral = true;
        } else if (s == "C") {
            a.drop_fill = true;
        } else if (s == "P") {
            a.drop_noise_entropy = true;
        } else {
            throw ValueError("config: ablate entries must be \"F\", \"C\" or \"P\"");
        }
    }
    return a;
}

json norm_to_json(NormP p) {
    switch (p) {
    case NormP::kL1: return json(1);
    case NormP::kL2: return json(2);
    case NormP::kLInf:
    default: return json("inf");
    }
}

NormP norm_from_json(const json& j) {
    if (j.is_string() && j.get<std::string>() == "inf") return NormP::kLInf;
    if (j.is_number_integer()) {
        const int v = j.get<int>();
        if (v == 1) return NormP::kL1;
        if (v == 2) return NormP::kL2;
    }
    throw ValueError("config: norm_p must be 1, 2 or \"inf\"");
}

json config_to_json(const OptimizerConfig& cfg) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["iters"] = cfg.iters;
    j["epsilon_budget"] = cfg.epsilon_budget;
    if (cfg.alpha_override) {
        j["alpha"] = *cfg.alpha_override;
    } else {
        j["alpha"] = nullptr;
    }
    j["momentum"] = cfg.momentum;
    j["gamma"] = cfg.gamma;
    j["norm_p"] = norm_to_json(cfg.norm_p);
    j["keep_fraction"] = cfg.keep_fraction;
    j["master_seed"] = cfg.master_seed;
    j["ablate"] = ablate_to_json(cfg.ablate);
    j["noise"] = noise_to_json(cfg.noise);
    j["entropy"] = entropy_to_json(cfg.entropy);
    j["highpass"] = highpass_to_json(cfg.highpass);
    j["padding"] = padding_to_json(cfg.padding);
    return j;
}

OptimizerConfig config_from_json(const json& j) {
    reject_unknown_keys(j,
                        {"schema_version", "iters", "epsilon_budget", "alpha", "momentum",
                         "gamma", "norm_p", "keep_fraction", "master_seed", "ablate", "noise",
                         "entropy", "highpass", "padding"},
                        "pipeline config");
    if (j.contains("schema_version") && j["schema_version"].get<int>() != kConfigSchemaVersion) {
        throw ValueError("config: unsupported schema_version");
    }
    OptimizerConfig cfg;
    cfg.iters = j.value("iters", cfg.iters);
    cfg.epsilon_budget = j.value("epsilon_budget", cfg.epsilon_budget);
    if (j.contains("alpha") && !j["alpha"].is_null()) {
        cfg.alpha_override = j["alpha"].get<double>();
    }
    cfg.momentum = j.value("momentum", cfg.momentum);
    cfg.gamma = j.value("gamma", cfg.gamma);
    if (j.contains("norm_p")) cfg.norm_p = norm_from_json(j["norm_p"]);
    cfg.keep_fraction = j.value("keep_fraction", cfg.keep_fraction);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    if (j.contains("ablate")) cfg.ablate = ablate_from_json(j["ablate"]);
    if (j.contains("noise")) cfg.noise = noise_from_json(j["noise"]);
    if (j.contains("entropy")) cfg.entropy = entropy_from_json(j["entropy"]);
    if (j.contains("highpass")) cfg.highpass = highpass_from_json(j["highpass"]);
    if (j.contains("padding")) cfg.padding = padding_from_json(j["padding"]);
    return cfg;
}

} // namespace

std::string to_json_text(const OptimizerConfig& cfg, int indent) {
    return config_to_json(cfg).dump(indent);
}

OptimizerConfig optimizer_config_from_json(const std::string& text) {
    return config_from_json(parse(text));
}

OptimizerConfig load_optimizer_config(const std::string& path) {
    return optimizer_config_from_json(read_file(path));
}

std::string to_json_text(const SynthFaceSpec& spec, int indent) {
    json j{{"identities", spec.identities},
           {"variants_per_identity", spec.variants_per_identity},
           {"image_size", spec.image_size},
           {"channels", spec.channels},
           {"geometry_seed", spec.geometry_seed}};
    return j.dump(indent);
}

SynthFaceSpec synth_spec_from_json(const std::string& text) {
    const json j = parse(text);
    reject_unknown_keys(
        j, {"identities", "variants_per_identity", "image_size", "channels", "geometry_seed"},
        "synthetic dataset spec");
    SynthFaceSpec s;
    s.identities = j.value("identities", s.identities);
    s.variants_per_identity = j.value("variants_per_identity", s.variants_per_identity);
    s.image_size = j.value("image_size", s.image_size);
    s.channels = j.value("channels", s.channels);
    s.geometry_seed = j.value("geometry_seed", s.geometry_seed);
    return s;
}

SynthFaceSpec load_synth_spec(const std::string& path) {
    return synth_spec_from_json(read_file(path));
}

bool json_has_master_seed(const std::string& text) {
    return parse(text).contains("master_seed");
}

std::string report_json_text(const RunReport& report, const OptimizerConfig& cfg, int indent) {
    json j;
    j["schema_version"] = kConfigSchemaVersion;
    j["kind"] = "anonymize";
    j["config"] = config_to_json(cfg);
    j["master_seed"] = report.master_seed;

    json iters = json::array();
    for (const auto& it : report.iterations) {
        iters.push_back(json{{"recognition_loss", it.recognition_loss},
                             {"entropy_term", it.entropy_term},
                             {"total_loss", it.total_loss},
                             {"grad_norm", it.grad_norm},
                             {"grad_norm_zero", it.grad_norm_zero}});
    }
    j["iterations"] = std::move(iters);

    json final_section{{"hard_entropy", report.final_hard_entropy},
                       {"ssim", report.final_ssim},
                       {"member_cosine", report.member_cosine},
                       {"resolved_cutoff", report.resolved_cutoff}};
    if (report.holdout_index) {
        final_section["holdout_index"] = *report.holdout_index;
        final_section["holdout_cosine"] = report.member_cosine.at(*report.holdout_index);
    }
    j["final"] = std::move(final_section);

    json warnings = json::array();
    if (report.degenerate_mask) warnings.push_back("degenerate mask: all pixels kept or pruned");
    j["warnings"] = std::move(warnings);

    j["timing"] = json{{"wall_seconds", report.wall_seconds}};
    return j.dump(indent);
}

} // namespace veilforge
