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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "veilforge/config.hpp"
#include "veilforge/embedder.hpp"
#include "veilforge/errors.hpp"
#include "veilforge/image_io.hpp"
#include "veilforge/metrics.hpp"
#include "veilforge/nn/checkpoint.hpp"
#include "veilforge/optimizer.hpp"
#include "veilforge/parallel.hpp"
#include "veilforge/recon.hpp"
#include "veilforge/selftest.hpp"
#include "veilforge/synth.hpp"

namespace vf = veilforge;
using ordered_json = nlohmann::ordered_json;

namespace {

// ---- report plumbing ------------------------------------------------------

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Timing is the one nondeterministic subtree; reruns are byte-identical
// once it is dropped.
void attach_timing(ordered_json& report, const Stopwatch& watch) {
    report["timing"] = ordered_json{{"wall_seconds", watch.seconds()},
                                    {"started_utc", utc_timestamp()}};
}

void emit_report(const ordered_json& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw vf::IoError("cannot open " + path + " for writing");
    out << text;
}

double json_safe(double v) {
    return std::isfinite(v) ? v : 0.0;
}

ordered_json metric_json(const vf::MetricReport& m) {
    ordered_json j;
    j["ssim"] = m.ssim;
    if (std::isinf(m.psnr)) {
        j["psnr"] = "inf";
    } else {
        j["psnr"] = m.psnr;
    }
    j["window"] = m.window;
    j["k1"] = m.k1;
    j["k2"] = m.k2;
    j["luminance_range"] = m.luminance_range;
    return j;
}

// ---- seed priority: flag > config file key > environment > default --------

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           bool config_has_seed, std::uint64_t config_seed) {
    if (flag_seed) return *flag_seed;
    if (config_has_seed) return config_seed;
    if (const char* env = std::getenv("VEILFORGE_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw vf::ValueError("VEILFORGE_SEED is not a valid integer");
        }
    }
    return config_seed;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vf::IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

vf::OptimizerConfig load_config_with_seed(const std::string& path,
                                          const std::optional<std::uint64_t>& flag_seed) {
    vf::OptimizerConfig cfg;
    bool has_seed_key = false;
    if (!path.empty()) {
        const std::string text = read_file(path);
        cfg = vf::optimizer_config_from_json(text);
        has_seed_key = vf::json_has_master_seed(text);
    }
    cfg.master_seed = resolve_seed(flag_seed, has_seed_key, cfg.master_seed);
    return cfg;
}

vf::EnsembleSpec load_ensemble(const std::vector<std::string>& checkpoints,
                               std::vector<double> betas, std::optional<std::size_t> holdout) {
    if (checkpoints.empty()) {
        throw vf::ValueError("no surrogate checkpoints given (use --surrogates)");
    }
    vf::EnsembleSpec ens;
    for (const auto& path : checkpoints) ens.members.push_back(vf::load_embedder(path));
    if (betas.empty()) betas.assign(checkpoints.size(), 200.0);
    if (betas.size() == 1 && checkpoints.size() > 1) betas.assign(checkpoints.size(), betas[0]);
    ens.betas = std::move(betas);
    ens.holdout = holdout;
    ens.validate();
    return ens;
}

// Identity-disjoint train/holdout split shared by attack-train, attack-eval
// and sweep.
struct SplitData {
    std::vector<std::pair<int, vf::ImageTensor>> train, holdout;
    vf::ImageTensor mean_image;
};

SplitData split_by_identity(const vf::SynthFaceSpec& spec, double holdout_fraction) {
    const auto all = vf::gen_dataset(spec);
    const int holdout_ids =
        std::max(1, static_cast<int>(holdout_fraction * spec.identities));
    const int first_holdout = spec.identities - holdout_ids;
    SplitData d;
    vf::ImageTensor acc(spec.image_size, spec.image_size, spec.channels);
    for (const auto& [id, img] : all) {
        (id >= first_holdout ? d.holdout : d.train).emplace_back(id, img);
        acc = acc + img;
    }
    d.mean_image = acc * (1.0 / static_cast<double>(all.size()));
    return d;
}

std::vector<std::pair<vf::ImageTensor, vf::ImageTensor>> anonymized_pairs(
    const std::vector<std::pair<int, vf::ImageTensor>>& set, const vf::OptimizerConfig& cfg,
    const vf::EnsembleSpec& ens, vf::SeedPolicy policy, std::uint64_t batch_seed, int threads) {
    std::vector<vf::ImageTensor> originals;
    originals.reserve(set.size());
    for (const auto& [id, img] : set) originals.push_back(img);
    vf::OptimizerConfig local = cfg;
    local.master_seed = batch_seed;
    const auto anon = vf::anonymize_batch(originals, local, ens, policy, threads);
    std::vector<std::pair<vf::ImageTensor, vf::ImageTensor>> pairs;
    pairs.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) pairs.emplace_back(anon[i], set[i].second);
    return pairs;
}

vf::SeedPolicy parse_policy(const std::string& s) {
    if (s == "fixed") return vf::SeedPolicy::kFixed;
    if (s == "per-image") return vf::SeedPolicy::kPerImage;
    throw vf::ValueError("policy must be 'fixed' or 'per-image'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"veilforge: stochastic face anonymization toolkit"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> flag_seed;
    int threads = vf::default_threads();
    bool verbose = false;
    app.add_option("--seed", flag_seed, "Master seed override (highest priority)");
    app.add_option("--threads", threads, "Worker count for batch subcommands");
    app.add_flag("--verbose", verbose, "Progress logging to stderr");

    // ---- anonymize ----
    auto* cmd_anon = app.add_subcommand("anonymize", "Anonymize one image");
    std::string anon_config, anon_in, anon_out, anon_report;
    std::vector<std::string> anon_surrogates;
    std::vector<double> anon_betas;
    std::optional<std::size_t> anon_holdout;
    cmd_anon->add_option("--config", anon_config, "Pipeline config JSON");
    cmd_anon->add_option("--in", anon_in, "Input image (png/ppm/pgm/vft1)")->required();
    cmd_anon->add_option("--out", anon_out, "Output image path")->required();
    cmd_anon->add_option("--report", anon_report, "Report JSON path (default stdout)");
    cmd_anon->add_option("--surrogates", anon_surrogates, "Surrogate checkpoints (VFW1)")
        ->delimiter(',')
        ->required();
    cmd_anon->add_option("--betas", anon_betas, "Per-member loss weights")->delimiter(',');
    cmd_anon->add_option("--holdout", anon_holdout, "Member index excluded from the loss");

    // ---- ablate ----
    auto* cmd_ablate = app.add_subcommand("ablate", "Anonymize with a module dropped");
    std::string ab_config, ab_in, ab_out, ab_report;
    std::vector<std::string> ab_drop, ab_surrogates;
    cmd_ablate->add_option("--config", ab_config, "Pipeline config JSON");
    cmd_ablate->add_option("--in", ab_in, "Input image")->required();
    cmd_ablate->add_option("--out", ab_out, "Output image path")->required();
    cmd_ablate->add_option("--report", ab_report, "Report JSON path (default stdout)");
    cmd_ablate->add_option("--drop", ab_drop, "Module(s) to drop: F, C or P")
        ->delimiter(',')
        ->required();
    cmd_ablate->add_option("--surrogates", ab_surrogates, "Surrogate checkpoints")
        ->delimiter(',')
        ->required();

    // ---- eval ----
    auto* cmd_eval = app.add_subcommand("eval", "SSIM/PSNR between two images");
    std::string eval_ref, eval_test, eval_report;
    cmd_eval->add_option("--ref", eval_ref, "Reference image")->required();
    cmd_eval->add_option("--test", eval_test, "Test image")->required();
    cmd_eval->add_option("--report", eval_report, "Report JSON path (default stdout)");

    // ---- train-surrogates ----
    auto* cmd_train = app.add_subcommand("train-surrogates",
                                         "Train surrogate embedders on synthetic identities");
    std::string tr_data, tr_outdir, tr_report;
    std::vector<std::string> tr_presets{"tiny-a", "tiny-b", "tiny-c", "tiny-d"};
    int tr_epochs = 12, tr_pairs = 3000;
    double tr_lr = 1e-3;
    cmd_train->add_option("--data", tr_data, "Synthetic dataset spec JSON (defaults: 200x20 at 32px)");
    cmd_train->add_option("--out-dir", tr_outdir, "Checkpoint output directory")->required();
    cmd_train->add_option("--report", tr_report, "Report JSON path (default stdout)");
    cmd_train->add_option("--presets", tr_presets, "Architecture presets")->delimiter(',');
    cmd_train->add_option("--epochs", tr_epochs, "Training epochs per surrogate");
    cmd_train->add_option("--pairs-per-epoch", tr_pairs, "Contrastive pairs per epoch");
    cmd_train->add_option("--lr", tr_lr, "Adam learning rate");

    // ---- attack-train ----
    auto* cmd_atrain = app.add_subcommand("attack-train",
                                          "Train a reconstruction attack against an anonymizer");
    std::string at_anon, at_data, at_out, at_report, at_policy = "per-image";
    std::vector<std::string> at_surrogates;
    int at_epochs = 30, at_base = 8;
    double at_lr = 1e-3, at_holdout_fraction = 0.2;
    cmd_atrain->add_option("--anonymizer", at_anon, "Pipeline config JSON")->required();
    cmd_atrain->add_option("--data", at_data, "Synthetic dataset spec JSON")->required();
    cmd_atrain->add_option("--out", at_out, "Output checkpoint (VFW1)")->required();
    cmd_atrain->add_option("--report", at_report, "Report JSON path (default stdout)");
    cmd_atrain->add_option("--surrogates", at_surrogates, "Surrogate checkpoints")
        ->delimiter(',')
        ->required();
    cmd_atrain->add_option("--policy", at_policy, "Anonymizer seeding: fixed | per-image");
    cmd_atrain->add_option("--epochs", at_epochs, "Attack training epochs");
    cmd_atrain->add_option("--lr", at_lr, "Adam learning rate");
    cmd_atrain->add_option("--base-channels", at_base, "Attack net width");
    cmd_atrain->add_option("--holdout-fraction", at_holdout_fraction,
                           "Identity fraction reserved for evaluation");

    // ---- attack-eval ----
    auto* cmd_aeval = app.add_subcommand("attack-eval",
                                         "Evaluate a reconstruction attack on held-out identities");
    std::string ae_ckpt, ae_anon, ae_data, ae_report, ae_policy = "per-image";
    std::vector<std::string> ae_surrogates;
    double ae_holdout_fraction = 0.2;
    cmd_aeval->add_option("--ckpt", ae_ckpt, "Attack checkpoint (VFW1)")->required();
    cmd_aeval->add_option("--anonymizer", ae_anon, "Pipeline config JSON")->required();
    cmd_aeval->add_option("--data", ae_data, "Synthetic dataset spec JSON")->required();
    cmd_aeval->add_option("--report", ae_report, "Report JSON path (default stdout)");
    cmd_aeval->add_option("--surrogates", ae_surrogates, "Surrogate checkpoints")
        ->delimiter(',')
        ->required();
    cmd_aeval->add_option("--policy", ae_policy, "Anonymizer seeding: fixed | per-image");
    cmd_aeval->add_option("--holdout-fraction", ae_holdout_fraction,
                          "Identity fraction reserved for evaluation");

    // ---- sweep ----
    auto* cmd_sweep = app.add_subcommand("sweep", "Attack quality vs training-set size");
    std::string sw_anon, sw_data, sw_report, sw_csv, sw_policy = "fixed";
    std::vector<std::string> sw_surrogates;
    std::vector<double> sw_sizes{0.1, 0.5, 1.0};
    int sw_epochs = 30, sw_base = 8;
    double sw_lr = 1e-3, sw_holdout_fraction = 0.2;
    cmd_sweep->add_option("--anonymizer", sw_anon, "Pipeline config JSON")->required();
    cmd_sweep->add_option("--data", sw_data, "Synthetic dataset spec JSON")->required();
    cmd_sweep->add_option("--sizes", sw_sizes, "Training-set fractions")->delimiter(',');
    cmd_sweep->add_option("--report", sw_report, "Report JSON path (default stdout)");
    cmd_sweep->add_option("--csv", sw_csv, "Plot-ready CSV output path");
    cmd_sweep->add_option("--surrogates", sw_surrogates, "Surrogate checkpoints")
        ->delimiter(',')
        ->required();
    cmd_sweep->add_option("--policy", sw_policy, "Anonymizer seeding: fixed | per-image");
    cmd_sweep->add_option("--epochs", sw_epochs, "Attack training epochs");
    cmd_sweep->add_option("--lr", sw_lr, "Adam learning rate");
    cmd_sweep->add_option("--base-channels", sw_base, "Attack net width");
    cmd_sweep->add_option("--holdout-fraction", sw_holdout_fraction,
                          "Identity fraction reserved for evaluation");

    // ---- selftest ----
    auto* cmd_self = app.add_subcommand("selftest", "Numerical invariant checks");
    std::string self_report;
    cmd_self->add_option("--report", self_report, "Report JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error
    }

    try {
        Stopwatch watch;

        if (*cmd_anon || *cmd_ablate) {
            const bool ablating = static_cast<bool>(*cmd_ablate);
            vf::OptimizerConfig cfg =
                load_config_with_seed(ablating ? ab_config : anon_config, flag_seed);
            std::string ablation_tag;
            if (ablating) {
                for (const auto& d : ab_drop) {
                    if (d == "F") {
                        cfg.ablate.drop_spectral = true;
                    } else if (d == "C") {
                        cfg.ablate.drop_fill = true;
                    } else if (d == "P") {
                        cfg.ablate.drop_noise_entropy = true;
                    } else {
                        throw vf::ValueError("--drop accepts F, C or P");
                    }
                    ablation_tag += (ablation_tag.empty() ? "w/o " : ",") + d;
                }
            }
            const vf::EnsembleSpec ens =
                ablating ? load_ensemble(ab_surrogates, {}, std::nullopt)
                         : load_ensemble(anon_surrogates, anon_betas, anon_holdout);
            const std::string in_path = ablating ? ab_in : anon_in;
            if (!std::filesystem::exists(in_path)) {
                throw vf::IoError("input image not found: " + in_path);
            }
            const vf::ImageTensor x = vf::load_image(in_path);
            if (verbose) std::cerr << "anonymizing " << in_path << "\n";
            auto [xp, run] = vf::anonymize(x, cfg, ens);
            vf::save_image(ablating ? ab_out : anon_out, xp);

            ordered_json report = ordered_json::parse(vf::report_json_text(run, cfg));
            report["kind"] = ablating ? "ablate" : "anonymize";
            if (ablating) report["ablation"] = ablation_tag;
            report["input"] = in_path;
            report["output"] = ablating ? ab_out : anon_out;
            report.erase("timing");
            attach_timing(report, watch);
            emit_report(report, ablating ? ab_report : anon_report);
            if (run.degenerate_mask) {
                std::cerr << "warning: degenerate mask (all pixels kept or pruned)\n";
            }
            return 0;
        }

        if (*cmd_eval) {
            const vf::ImageTensor ref = vf::load_image(eval_ref);
            const vf::ImageTensor test = vf::load_image(eval_test);
            const vf::MetricReport m = vf::evaluate_pair(ref, test);
            ordered_json report;
            report["schema_version"] = vf::kConfigSchemaVersion;
            report["kind"] = "eval";
            report["ref"] = eval_ref;
            report["test"] = eval_test;
            report["metrics"] = metric_json(m);
            attach_timing(report, watch);
            emit_report(report, eval_report);
            return 0;
        }

        if (*cmd_train) {
            vf::SynthFaceSpec spec;
            spec.identities = 200;
            spec.variants_per_identity = 20;
            spec.image_size = 32;
            bool spec_has_seed = false;
            if (!tr_data.empty()) {
                const std::string text = read_file(tr_data);
                spec = vf::synth_spec_from_json(text);
                spec_has_seed = text.find("geometry_seed") != std::string::npos;
            }
            spec.geometry_seed = resolve_seed(flag_seed, spec_has_seed, spec.geometry_seed);
            std::filesystem::create_directories(tr_outdir);

            if (verbose) std::cerr << "generating dataset\n";
            const auto data = vf::gen_dataset(spec);

            ordered_json per_preset = ordered_json::array();
            for (std::size_t i = 0; i < tr_presets.size(); ++i) {
                const auto& preset = tr_presets[i];
                if (verbose) std::cerr << "training " << preset << "\n";
                vf::SurrogateEmbedder model = vf::init_embedder(
                    preset, vf::Rng(spec.geometry_seed).substream("surrogate", i).seed(),
                    spec.image_size, spec.channels);
                vf::SurrogateTrainConfig cfg;
                cfg.epochs = tr_epochs;
                cfg.pairs_per_epoch = tr_pairs;
                cfg.lr = tr_lr;
                cfg.seed = vf::Rng(spec.geometry_seed).substream("surrogate-train", i).seed();
                cfg.threads = threads;
                vf::SurrogateTrainStats stats;
                vf::train_surrogate(model, data, cfg, &stats);
                const std::string path = tr_outdir + "/" + preset + ".vfw1";
                vf::save_embedder(path, model);
                per_preset.push_back(ordered_json{{"preset", preset},
                                                  {"checkpoint", path},
                                                  {"parameters", model.parameter_count()},
                                                  {"epoch_loss", stats.epoch_loss}});
            }
            ordered_json report;
            report["schema_version"] = vf::kConfigSchemaVersion;
            report["kind"] = "train-surrogates";
            report["data"] = ordered_json::parse(vf::to_json_text(spec));
            report["epochs"] = tr_epochs;
            report["pairs_per_epoch"] = tr_pairs;
            report["lr"] = tr_lr;
            report["surrogates"] = per_preset;
            attach_timing(report, watch);
            emit_report(report, tr_report);
            return 0;
        }

        if (*cmd_atrain) {
            const vf::OptimizerConfig cfg = load_config_with_seed(at_anon, flag_seed);
            const vf::EnsembleSpec ens = load_ensemble(at_surrogates, {}, std::nullopt);
            const vf::SynthFaceSpec spec = vf::load_synth_spec(at_data);
            const vf::SeedPolicy policy = parse_policy(at_policy);
            const SplitData data = split_by_identity(spec, at_holdout_fraction);

            if (verbose) std::cerr << "anonymizing " << data.train.size() << " images\n";
            const auto pairs = anonymized_pairs(data.train, cfg, ens, policy,
                                                cfg.master_seed, threads);

            vf::ReconNet net(spec.channels, at_base,
                             vf::Rng(cfg.master_seed).substream("attack").seed());
            vf::ReconTrainConfig tcfg;
            tcfg.epochs = at_epochs;
            tcfg.lr = at_lr;
            tcfg.seed = vf::Rng(cfg.master_seed).substream("attack-train").seed();
            tcfg.threads = threads;
            vf::ReconTrainReport treport;
            if (verbose) std::cerr << "training attack net\n";
            vf::train_recon(pairs, net, tcfg, &treport);
            vf::save_recon(at_out, net);

            ordered_json report;
            report["schema_version"] = vf::kConfigSchemaVersion;
            report["kind"] = "attack-train";
            report["anonymizer"] = ordered_json::parse(vf::to_json_text(cfg));
            report["data"] = ordered_json::parse(vf::to_json_text(spec));
            report["policy"] = at_policy;
            report["train_pairs"] = pairs.size();
            report["epochs"] = at_epochs;
            report["lr"] = at_lr;
            report["base_channels"] = at_base;
            report["checkpoint"] = at_out;
            report["train_mse"] = treport.train_mse;
            report["val_mse"] = treport.val_mse;
            report["lr_schedule"] = treport.lr;
            attach_timing(report, watch);
            emit_report(report, at_report);
            return 0;
        }

        if (*cmd_aeval) {
            const vf::OptimizerConfig cfg = load_config_with_seed(ae_anon, flag_seed);
            const vf::EnsembleSpec ens = load_ensemble(ae_surrogates, {}, std::nullopt);
            const vf::SynthFaceSpec spec = vf::load_synth_spec(ae_data);
            const vf::SeedPolicy policy = parse_policy(ae_policy);
            const SplitData data = split_by_identity(spec, ae_holdout_fraction);
            const vf::ReconNet net = vf::load_recon(ae_ckpt);

            const std::uint64_t eval_seed =
                policy == vf::SeedPolicy::kFixed
                    ? cfg.master_seed
                    : vf::Rng(cfg.master_seed).substream("eval").seed();
            const auto pairs =
                anonymized_pairs(data.holdout, cfg, ens, policy, eval_seed, threads);

            double mean_ssim = 0.0, mean_psnr = 0.0, to_mean = 0.0;
            std::size_t finite_psnr = 0;
            for (const auto& [anon, original] : pairs) {
                const vf::ImageTensor rec = net.reconstruct(anon);
                mean_ssim += vf::ssim(original, rec);
                const double p = vf::psnr(original, rec);
                if (std::isfinite(p)) {
                    mean_psnr += p;
                    ++finite_psnr;
                }
                to_mean += vf::ssim(data.mean_image, rec);
            }
            const auto n = static_cast<double>(pairs.size());
            ordered_json report;
            report["schema_version"] = vf::kConfigSchemaVersion;
            report["kind"] = "attack-eval";
            report["anonymizer"] = ordered_json::parse(vf::to_json_text(cfg));
            report["data"] = ordered_json::parse(vf::to_json_text(spec));
            report["policy"] = ae_policy;
            report["checkpoint"] = ae_ckpt;
            report["holdout_pairs"] = pairs.size();
            report["mean_ssim"] = json_safe(mean_ssim / n);
            report["mean_psnr"] =
                finite_psnr > 0 ? json_safe(mean_psnr / static_cast<double>(finite_psnr)) : 0.0;
            report["ssim_to_mean_image"] = json_safe(to_mean / n);
            attach_timing(report, watch);
            emit_report(report, ae_report);
            return 0;
        }

        if (*cmd_sweep) {
            const vf::OptimizerConfig cfg = load_config_with_seed(sw_anon, flag_seed);
            const vf::EnsembleSpec ens = load_ensemble(sw_surrogates, {}, std::nullopt);
            const vf::SynthFaceSpec spec = vf::load_synth_spec(sw_data);

            vf::GapBudget budget;
            budget.data = spec;
            budget.holdout_identity_fraction = sw_holdout_fraction;
            budget.train.epochs = sw_epochs;
            budget.train.lr = sw_lr;
            budget.train.seed = vf::Rng(cfg.master_seed).substream("sweep-train").seed();
            budget.train.threads = threads;
            budget.threads = threads;
            budget.seed = cfg.master_seed;

            if (verbose) std::cerr << "running size sweep\n";
            const auto points =
                vf::attack_size_sweep(cfg, ens, budget, parse_policy(sw_policy), sw_sizes);

            ordered_json rows = ordered_json::array();
            std::string csv = "fraction,train_pairs,mean_ssim,mean_psnr\n";
            for (const auto& p : points) {
                rows.push_back(ordered_json{{"fraction", p.fraction},
                                            {"train_pairs", p.train_pairs},
                                            {"mean_ssim", p.mean_ssim},
                                            {"mean_psnr", json_safe(p.mean_psnr)}});
                csv += std::to_string(p.fraction) + "," + std::to_string(p.train_pairs) + "," +
                       std::to_string(p.mean_ssim) + "," + std::to_string(p.mean_psnr) + "\n";
            }
            if (!sw_csv.empty()) {
                std::ofstream out(sw_csv, std::ios::binary);
                if (!out) throw vf::IoError("cannot open " + sw_csv + " for writing");
                out << csv;
            }
            ordered_json report;
            report["schema_version"] = vf::kConfigSchemaVersion;
            report["kind"] = "sweep";
            report["anonymizer"] = ordered_json::parse(vf::to_json_text(cfg));
            report["data"] = ordered_json::parse(vf::to_json_text(spec));
            report["policy"] = sw_policy;
            report["epochs"] = sw_epochs;
            report["points"] = rows;
            attach_timing(report, watch);
            emit_report(report, sw_report);
            return 0;
        }

        if (*cmd_self) {
            const vf::SelfTestReport result = vf::run_selftest();
            ordered_json checks = ordered_json::array();
            for (const auto& c : result.checks) {
                std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail
                          << "\n";
                checks.push_back(
                    ordered_json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            }
            ordered_json report;
            report["schema_version"] = vf::kConfigSchemaVersion;
            report["kind"] = "selftest";
            report["passed"] = result.all_passed();
            report["checks"] = checks;
            attach_timing(report, watch);
            if (!self_report.empty()) emit_report(report, self_report);
            if (!result.all_passed()) {
                std::cerr << "selftest: numerical invariant violation\n";
                return 3;
            }
            return 0;
        }
    } catch (const vf::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const vf::ValueError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vf::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
