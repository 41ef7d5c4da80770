// SPDX-License-Identifier: Apache-2.0
//
// rfiscope: antenna-array imaging and RFI/jamming anomaly detection
// Copyright (C) 2026 The rfiscope authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// rfiscope: command-line front end for the simulation, imaging, training and
// detection library.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 stage failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rfiscope/config.hpp"
#include "rfiscope/detector.hpp"
#include "rfiscope/errors.hpp"
#include "rfiscope/pipeline.hpp"
#include "rfiscope/scenario.hpp"
#include "rfiscope/seeding.hpp"

namespace fs = std::filesystem;
using namespace rfiscope;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitStage = 3;

std::pair<std::size_t, std::size_t> parse_pair(const std::string& text, const char* what)
{
    const auto x = text.find('x');
    try {
        if (x != std::string::npos) {
            std::size_t used_a = 0, used_b = 0;
            const auto a = std::stoul(text.substr(0, x), &used_a);
            const auto b = std::stoul(text.substr(x + 1), &used_b);
            if (used_a == x && used_b == text.size() - x - 1)
                return {a, b};
        }
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string(what) + " must look like 8x8, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text)
{
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        std::size_t v = 0;
        try {
            v = std::stoul(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || used == 0)
            throw ConfigError("expected a comma list of integers, got '" + text + "'");
        out.push_back(v);
    }
    return out;
}

fs::path default_out(const std::string& subcommand)
{
    const char* root = std::getenv("RFISCOPE_OUT_ROOT");
    return fs::path(root && *root ? root : "rfiscope_runs") / subcommand;
}

void require_path(const fs::path& p, const std::string& what)
{
    if (!fs::exists(p))
        throw ConfigError(what + " not found: " + p.string());
}

void write_run_json(const fs::path& out, const std::string& command, const Json& resolved)
{
    fs::create_directories(out);
    write_json_file(out / "run.json", run_echo(command, resolved));
}

// Options that overlay a pipeline-format config. Unset flags leave the config
// file (or the default) in place.
struct Overlay {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    // dataset
    std::optional<std::string> geometry, spacing, image, grid, snr_sweep, inr_sweep, kinds, jammers, normalization;
    std::optional<double> wavelength, test_snr;
    std::optional<std::size_t> frames, snapshots, test_positions;
    // model and training
    std::optional<std::string> encoder, decoder;
    std::optional<double> alpha, lr, percentile;
    std::optional<std::size_t> epochs, batch, patience;
    bool l1_last_only = false;

    void add_common(CLI::App* app)
    {
        app->add_option("--config", config_file, "JSON config file (pipeline schema)")->check(CLI::ExistingFile);
        app->add_option("--seed", seed, "Master seed");
    }

    void add_dataset(CLI::App* app)
    {
        app->add_option("--geometry", geometry, "Array element counts NYxNZ");
        app->add_option("--spacing", spacing, "Element spacing d_y,d_z in meters");
        app->add_option("--wavelength", wavelength, "Carrier wavelength in meters");
        app->add_option("--image", image, "DFT size UxV");
        app->add_option("--grid", grid, "SOI placement grid NUxNV");
        app->add_option("--snr-sweep", snr_sweep, "Training SNR levels, lo:hi:step or a,b,c (dB)");
        app->add_option("--inr-sweep", inr_sweep, "Jammer INR levels, lo:hi:step or a,b,c (dB)");
        app->add_option("--kinds", kinds, "Jammer kinds, comma list of transient,static,moving");
        app->add_option("--jammers", jammers, "Simultaneous jammer counts, comma list");
        app->add_option("--frames", frames, "Images per sequence (P)");
        app->add_option("--snapshots", snapshots, "Snapshots per image (S)");
        app->add_option("--normalization", normalization, "per-sequence-max or log");
        app->add_option("--test-snr", test_snr, "SOI SNR of the test split (dB)");
        app->add_option("--test-positions", test_positions, "Grid positions used by the test split");
    }

    void add_model(CLI::App* app)
    {
        app->add_option("--encoder", encoder, "Encoder LSTM widths, comma list");
        app->add_option("--decoder", decoder, "Decoder LSTM widths, comma list");
        app->add_option("--alpha", alpha, "Weight of the L1 code penalty");
        app->add_flag("--l1-last-only", l1_last_only, "Penalise only the last code step");
        app->add_option("--lr", lr, "Adam learning rate");
        app->add_option("--epochs", epochs, "Maximum epochs");
        app->add_option("--batch", batch, "Mini-batch size");
        app->add_option("--patience", patience, "Early-stopping patience in epochs");
    }

    void add_percentile(CLI::App* app)
    {
        app->add_option("--percentile", percentile, "Calibration percentile of training errors");
    }

    Json patch() const
    {
        Json p = Json::object();
        Json d = Json::object(), m = Json::object(), t = Json::object();
        if (seed)
            p["seed"] = *seed;
        if (workers)
            p["workers"] = *workers;
        if (percentile)
            p["percentile"] = *percentile;
        if (geometry) {
            const auto [ny, nz] = parse_pair(*geometry, "--geometry");
            d["geometry"]["n_y"] = ny;
            d["geometry"]["n_z"] = nz;
        }
        if (spacing) {
            const auto v = parse_sweep(*spacing);
            if (v.size() != 2)
                throw ConfigError("--spacing needs d_y,d_z");
            d["geometry"]["d_y"] = v[0];
            d["geometry"]["d_z"] = v[1];
        }
        if (wavelength)
            d["geometry"]["wavelength"] = *wavelength;
        if (image) {
            const auto [u, v] = parse_pair(*image, "--image");
            d["image"] = {{"u_fft", u}, {"v_fft", v}};
        }
        if (grid) {
            const auto [u, v] = parse_pair(*grid, "--grid");
            d["grid"]["n_u"] = u;
            d["grid"]["n_v"] = v;
        }
        if (snr_sweep) {
            const auto sweep = parse_sweep(*snr_sweep);
            d["train_snr_db"] = sweep;
            d["val_snr_db"] = sweep;
            d["holdout_snr_db"] = sweep;
        }
        if (inr_sweep)
            d["inr_db"] = parse_sweep(*inr_sweep);
        if (kinds)
            d["kinds"] = split_list(*kinds);
        if (jammers)
            d["jammer_counts"] = parse_sizes(*jammers);
        if (frames)
            d["frames"] = *frames;
        if (snapshots)
            d["snapshots"] = *snapshots;
        if (normalization)
            d["normalization"] = *normalization;
        if (test_snr)
            d["test_snr_db"] = *test_snr;
        if (test_positions)
            d["test_positions"] = *test_positions;
        if (encoder)
            m["encoder_hidden"] = parse_sizes(*encoder);
        if (decoder)
            m["decoder_hidden"] = parse_sizes(*decoder);
        if (alpha)
            m["alpha"] = *alpha;
        if (l1_last_only)
            m["l1_last_only"] = true;
        if (lr)
            t["learning_rate"] = *lr;
        if (epochs)
            t["max_epochs"] = *epochs;
        if (batch)
            t["batch_size"] = *batch;
        if (patience)
            t["patience"] = *patience;
        if (!d.empty())
            p["dataset"] = d;
        if (!m.empty())
            p["model"] = m;
        if (!t.empty())
            p["training"] = t;
        return p;
    }

    // Default, then config file, then flags.
    PipelineConfig resolve() const
    {
        PipelineConfig c;
        if (!config_file.empty())
            c = pipeline_config_from_json(read_json_file(config_file), c);
        c = pipeline_config_from_json(patch(), c);
        return c;
    }
};

struct Paths {
    std::string out, scenario, dataset, model, threshold, split;
};

int cmd_simulate(const Paths& paths, std::optional<std::uint64_t> seed)
{
    require_path(paths.scenario, "scenario file");
    Scenario s = load_scenario(paths.scenario);
    if (seed)
        s.seed = *seed;
    const fs::path out = paths.out.empty() ? default_out("simulate") : fs::path(paths.out);
    write_run_json(out, "simulate", scenario_to_json(s));
    write_scenario_correlations(out, s);
    std::cout << "wrote " << s.sim.frames << " correlation frame(s) to " << out.string() << '\n';
    return 0;
}

int cmd_image(const Paths& paths, std::optional<std::uint64_t> seed)
{
    require_path(paths.scenario, "scenario file");
    Scenario s = load_scenario(paths.scenario);
    if (seed)
        s.seed = *seed;
    const fs::path out = paths.out.empty() ? default_out("image") : fs::path(paths.out);
    write_run_json(out, "image", scenario_to_json(s));
    write_scenario_images(out, s);
    std::cout << "wrote " << s.sim.frames << " image(s) to " << out.string() << '\n';
    return 0;
}

int cmd_dataset(const Paths& paths, const PipelineConfig& c)
{
    const fs::path out = paths.out.empty() ? default_out("dataset") : fs::path(paths.out);
    write_run_json(out, "dataset", Json{{"seed", c.seed}, {"dataset", to_json(c.dataset)}, {"workers", c.workers}});
    const DatasetSplits splits = generate_splits(c.dataset, c.seed, c.workers);
    write_splits(out, splits, c.dataset, c.seed);
    std::cout << "train " << splits.train.size() << ", val " << splits.val.size() << ", holdout "
              << splits.holdout.size() << ", test " << splits.test.size() << " sequences in " << out.string() << '\n';
    return 0;
}

int cmd_train(const Paths& paths, const PipelineConfig& c)
{
    require_path(paths.dataset, "dataset directory");
    const fs::path data(paths.dataset);
    const auto train_seqs = read_split(data, "train");
    const auto val_seqs = read_split(data, "val");
    if (train_seqs.empty() || val_seqs.empty())
        throw ConfigError("dataset has an empty train or val split");

    ModelConfig mc = c.model;
    mc.input_dim = feature_dim(train_seqs.front().size);
    mc.sequence_len = train_seqs.front().frame_count();
    TrainConfig tc = c.training;
    tc.seed = derive_seed(c.seed, "training");
    tc.workers = c.workers;

    const fs::path out = paths.out.empty() ? default_out("train") : fs::path(paths.out);
    const Json resolved{{"seed", c.seed}, {"dataset", paths.dataset}, {"model", to_json(c.model)},
                        {"training", to_json(c.training)}};
    Json echo = resolved;
    echo["workers"] = c.workers;
    write_run_json(out, "train", echo);

    const TrainResult r = train(AutoencoderModel::create(mc, derive_seed(c.seed, "model")), features_of(train_seqs),
                                features_of(val_seqs), tc, [](const EpochRecord& e) {
                                    std::cout << "epoch " << e.epoch << "  train " << e.train_loss << "  val "
                                              << e.val_loss << '\n';
                                });
    write_loss_curve(out / "loss_curve.csv", r.curve);
    if (r.diverged)
        throw StageFailure("train", r.diagnostic);
    save_checkpoint(out / "model.ckpt", r.model, resolved.dump());
    std::cout << "best epoch " << r.best_epoch << ", checkpoint " << (out / "model.ckpt").string() << '\n';
    return 0;
}

int cmd_calibrate(const Paths& paths, const PipelineConfig& c)
{
    require_path(paths.model, "model checkpoint");
    require_path(paths.dataset, "dataset directory");
    const AutoencoderModel model = load_checkpoint(paths.model);
    const std::string split = paths.split.empty() ? "train" : paths.split;
    const auto seqs = read_split(paths.dataset, split);
    const DetectorThreshold t = calibrate(model, features_of(seqs), c.percentile, c.workers);

    const fs::path out = paths.out.empty() ? default_out("calibrate") : fs::path(paths.out);
    write_run_json(out, "calibrate", Json{{"model", paths.model}, {"dataset", paths.dataset}, {"split", split},
                                          {"percentile", c.percentile}, {"workers", c.workers}});
    save_threshold(out / "threshold.json", t);
    std::cout << "threshold " << std::setprecision(10) << t.threshold << " from " << t.calibration_size
              << " sequences\n";
    return 0;
}

int cmd_detect(const Paths& paths, const PipelineConfig& c)
{
    require_path(paths.model, "model checkpoint");
    require_path(paths.threshold, "threshold file");
    require_path(paths.dataset, "dataset directory");
    const AutoencoderModel model = load_checkpoint(paths.model);
    const DetectorThreshold t = load_threshold(paths.threshold);
    const std::string split = paths.split.empty() ? "test" : paths.split;
    const auto seqs = read_split(paths.dataset, split);
    const auto errors = reconstruction_errors(model, features_of(seqs), c.workers);

    const fs::path out = paths.out.empty() ? default_out("detect") : fs::path(paths.out);
    write_run_json(out, "detect", Json{{"model", paths.model}, {"threshold", paths.threshold},
                                       {"dataset", paths.dataset}, {"split", split}, {"workers", c.workers}});
    std::ofstream os(out / "detections.csv");
    os << "index,error,decision,label\n" << std::setprecision(17);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        const bool anomalous = exceeds(errors[i], t.threshold);
        flagged += anomalous;
        os << i << ',' << errors[i] << ',' << (anomalous ? "anomalous" : "clean") << ',' << to_string(seqs[i].label)
           << '\n';
    }
    std::cout << flagged << " of " << seqs.size() << " sequences flagged anomalous\n";
    return 0;
}

int cmd_eval(const Paths& paths, const PipelineConfig& c)
{
    require_path(paths.model, "model checkpoint");
    require_path(paths.threshold, "threshold file");
    require_path(paths.dataset, "dataset directory");
    const AutoencoderModel model = load_checkpoint(paths.model);
    const DetectorThreshold t = load_threshold(paths.threshold);
    const std::string split = paths.split.empty() ? "test" : paths.split;
    const auto seqs = read_split(paths.dataset, split);
    const EvaluationReport report = evaluate(model, t, seqs, c.workers);

    const fs::path out = paths.out.empty() ? default_out("eval") : fs::path(paths.out);
    write_run_json(out, "eval", Json{{"model", paths.model}, {"threshold", paths.threshold},
                                     {"dataset", paths.dataset}, {"split", split}, {"workers", c.workers}});
    write_accuracy_csv(out / "accuracy_vs_inr.csv", report);
    write_error_csv(out / "recon_error_hist.csv", report);
    std::cout << "accuracy " << std::setprecision(4) << report.accuracy << " over " << report.total
              << " sequences (" << report.skipped << " skipped)\n";
    return 0;
}

int cmd_pipeline(const Paths& paths, const PipelineConfig& c, bool resume)
{
    const fs::path out = paths.out.empty() ? default_out("pipeline") : fs::path(paths.out);
    const PipelineSummary s = run_pipeline(c, out, resume);
    for (const auto& stage : s.skipped_stages)
        std::cout << "skipped up-to-date stage " << stage << '\n';
    std::cout << "accuracy " << std::setprecision(4) << s.accuracy << ", held-out clean flagged "
              << s.holdout_false_positive_rate << " of " << s.holdout_size << '\n'
              << "outputs in " << out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Array imaging and LSTM-autoencoder interference detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", RFISCOPE_VERSION);

    Overlay overlay;
    Paths paths;
    bool verbose = false;
    bool resume = false;
    std::size_t workers = 1;
    app.add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", verbose, "Progress messages on stderr");

    auto* simulate = app.add_subcommand("simulate", "Dump per-frame sample and lag correlations for a scenario");
    auto* image = app.add_subcommand("image", "Render dirty images (PGM + CSV) and truth.json for a scenario");
    for (auto* sub : {simulate, image}) {
        sub->add_option("--scenario", paths.scenario, "Scenario JSON")->required();
        sub->add_option("--out", paths.out, "Output directory");
        sub->add_option("--seed", overlay.seed, "Override the scenario seed");
    }

    auto* dataset = app.add_subcommand("dataset", "Generate train/val/holdout/test splits");
    overlay.add_common(dataset);
    overlay.add_dataset(dataset);
    dataset->add_option("--out", paths.out, "Output directory");

    auto* train_cmd = app.add_subcommand("train", "Train the autoencoder on a dataset's clean splits");
    overlay.add_common(train_cmd);
    overlay.add_model(train_cmd);
    train_cmd->add_option("--dataset", paths.dataset, "Dataset directory")->required();
    train_cmd->add_option("--out", paths.out, "Output directory");

    auto* calibrate_cmd = app.add_subcommand("calibrate", "Percentile threshold from training errors");
    overlay.add_common(calibrate_cmd);
    overlay.add_percentile(calibrate_cmd);
    calibrate_cmd->add_option("--model", paths.model, "Checkpoint")->required();
    calibrate_cmd->add_option("--dataset", paths.dataset, "Dataset directory")->required();
    calibrate_cmd->add_option("--split", paths.split, "Split to calibrate on (default train)");
    calibrate_cmd->add_option("--out", paths.out, "Output directory");

    auto* detect = app.add_subcommand("detect", "Per-sequence errors and decisions");
    auto* eval = app.add_subcommand("eval", "Accuracy tables and error histogram");
    for (auto* sub : {detect, eval}) {
        sub->add_option("--model", paths.model, "Checkpoint")->required();
        sub->add_option("--threshold", paths.threshold, "threshold.json")->required();
        sub->add_option("--dataset", paths.dataset, "Dataset directory")->required();
        sub->add_option("--split", paths.split, "Split to score (default test)");
        sub->add_option("--out", paths.out, "Output directory");
    }

    auto* pipeline = app.add_subcommand("pipeline", "dataset -> train -> calibrate -> evaluate");
    overlay.add_common(pipeline);
    overlay.add_dataset(pipeline);
    overlay.add_model(pipeline);
    overlay.add_percentile(pipeline);
    pipeline->add_option("--out", paths.out, "Output directory");
    pipeline->add_flag("--resume", resume, "Skip stages whose outputs match the current config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    set_verbose(verbose);
    try {
        if (app.get_option("--workers")->count() > 0)
            overlay.workers = workers;
        if (*simulate)
            return cmd_simulate(paths, overlay.seed);
        if (*image)
            return cmd_image(paths, overlay.seed);
        const PipelineConfig config = overlay.resolve();
        if (*dataset)
            return cmd_dataset(paths, config);
        if (*train_cmd)
            return cmd_train(paths, config);
        if (*calibrate_cmd)
            return cmd_calibrate(paths, config);
        if (*detect)
            return cmd_detect(paths, config);
        if (*eval)
            return cmd_eval(paths, config);
        if (*pipeline)
            return cmd_pipeline(paths, config, resume);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const StageFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    }
    return kExitUsage;
}
