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

#include "rfiscope/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>

#include "rfiscope/errors.hpp"
#include "rfiscope/seeding.hpp"

namespace rfiscope {

namespace fs = std::filesystem;

namespace {

const char* const kSplitNames[] = {"train", "val", "holdout", "test"};

fs::path split_path(const fs::path& dir, const std::string& name) { return dir / (name + ".rfd"); }

bool all_exist(std::initializer_list<fs::path> paths)
{
    for (const auto& p : paths)
        if (!fs::exists(p))
            return false;
    return true;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs `body` unless resuming and the stage's hash and outputs are already on
// disk. Any exception becomes a StageFailure naming the stage.
class StageRunner {
public:
    StageRunner(fs::path ledger, bool resume) : ledger_(std::move(ledger)), resume_(resume)
    {
        if (resume_ && fs::exists(ledger_))
            recorded_ = read_json_file(ledger_);
        if (!recorded_.is_object())
            recorded_ = Json::object();
    }

    bool run(const std::string& name, const std::string& hash, std::initializer_list<fs::path> outputs,
             const std::function<void()>& body, std::vector<std::string>& skipped)
    {
        if (resume_ && recorded_.value(name, std::string()) == hash && all_exist(outputs)) {
            log_info("stage " + name + ": up to date, skipped");
            skipped.push_back(name);
            return false;
        }
        recorded_.erase(name);
        write_json_file(ledger_, recorded_);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const StageFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw StageFailure(name, e.what());
        }
        recorded_[name] = hash;
        write_json_file(ledger_, recorded_);
        log_info("stage " + name + ": done in " + std::to_string(seconds_since(t0)) + " s");
        return true;
    }

private:
    fs::path ledger_;
    bool resume_;
    Json recorded_;
};

void write_errors_csv(const fs::path& path, std::span<const double> errors)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    os << "error\n" << std::setprecision(17);
    for (double e : errors)
        os << e << '\n';
}

} // namespace

DatasetSplits generate_splits(const DatasetConfig& config, std::uint64_t seed, std::size_t workers)
{
    SimulationSettings sim = config.sim;
    sim.workers = workers;
    const std::vector<Bin> grid = soi_grid(config.grid, sim.geometry, sim.image);
    if (grid.empty())
        throw ConfigError("SOI grid has no visible positions");
    const std::size_t n_test = std::min(config.test_positions, grid.size());
    if (n_test == 0)
        throw ConfigError("test_positions must be at least 1");

    // Test positions are spread evenly over the grid rather than taken from one corner.
    std::vector<Bin> test_bins;
    for (std::size_t i = 0; i < n_test; ++i)
        test_bins.push_back(grid[i * grid.size() / n_test]);

    const std::uint64_t data_seed = derive_seed(seed, "dataset");
    DatasetSplits s;
    s.train = generate_clean_split(sim, grid, config.train_snr_db, config.train_replicates, data_seed, "train");
    s.val = generate_clean_split(sim, grid, config.val_snr_db, config.val_replicates, data_seed, "val");
    s.holdout =
        generate_clean_split(sim, grid, config.holdout_snr_db, config.holdout_replicates, data_seed, "holdout");
    const std::vector<double> test_snr{config.test_snr_db};
    s.test = generate_clean_split(sim, test_bins, test_snr, config.test_clean_replicates, data_seed, "test-clean");
    auto anomalous = generate_anomalous_split(sim, test_bins, test_snr, config.plan, data_seed, "test-anomalous");
    s.test.insert(s.test.end(), std::make_move_iterator(anomalous.begin()), std::make_move_iterator(anomalous.end()));
    return s;
}

void write_splits(const fs::path& dir, const DatasetSplits& splits, const DatasetConfig& config, std::uint64_t seed)
{
    fs::create_directories(dir);
    const std::vector<ImageSequence>* parts[] = {&splits.train, &splits.val, &splits.holdout, &splits.test};
    Json counts = Json::object();
    for (std::size_t i = 0; i < 4; ++i) {
        write_dataset(split_path(dir, kSplitNames[i]), *parts[i]);
        counts[kSplitNames[i]] = parts[i]->size();
    }
    const auto grid = soi_grid(config.grid, config.sim.geometry, config.sim.image);
    Json bins = Json::array();
    for (Bin b : grid)
        bins.push_back({b.u, b.v});
    write_json_file(dir / "manifest.json", Json{{"format", "rfiscope-dataset"},
                                                {"version", 1},
                                                {"seed", seed},
                                                {"counts", counts},
                                                {"soi_grid", bins},
                                                {"normalization", to_string(config.sim.normalization)},
                                                {"config", to_json(config)}});
}

std::vector<ImageSequence> read_split(const fs::path& dir, const std::string& name)
{
    return read_dataset(split_path(dir, name));
}

std::vector<Eigen::MatrixXd> features_of(std::span<const ImageSequence> seqs)
{
    std::vector<Eigen::MatrixXd> out;
    out.reserve(seqs.size());
    for (const auto& s : seqs)
        out.push_back(embed_look_angle(s));
    return out;
}

ModelConfig resolve_model(ModelConfig model, const DatasetConfig& dataset)
{
    model.input_dim = feature_dim(dataset.sim.image);
    model.sequence_len = dataset.sim.frames;
    return model;
}

Json run_echo(const std::string& command, const Json& resolved)
{
    return Json{{"command", command}, {"config", resolved}, {"versions", version_info()}};
}

PipelineSummary run_pipeline(const PipelineConfig& config, const fs::path& out, bool resume)
{
    fs::create_directories(out);
    const Json resolved = to_json(config);
    write_json_file(out / "run.json", run_echo("pipeline", resolved));

    const fs::path data_dir = out / "dataset";
    const fs::path model_dir = out / "model";
    const fs::path eval_dir = out / "eval";
    const fs::path ckpt = model_dir / "model.ckpt";
    const fs::path threshold_file = out / "threshold.json";

    const std::string h_data = json_digest(Json{{"seed", config.seed}, {"dataset", resolved.at("dataset")}});
    const std::string h_train = json_digest(Json{
        {"upstream", h_data}, {"model", resolved.at("model")}, {"training", resolved.at("training")}});
    const std::string h_cal = json_digest(Json{{"upstream", h_train}, {"percentile", config.percentile}});
    const std::string h_eval = json_digest(Json{{"upstream", h_cal}});

    StageRunner stages(out / "stages.json", resume);
    PipelineSummary summary;

    std::optional<DatasetSplits> splits;
    auto split = [&](const char* name) -> const std::vector<ImageSequence>& {
        if (!splits) {
            splits.emplace();
            splits->train = read_split(data_dir, "train");
            splits->val = read_split(data_dir, "val");
            splits->holdout = read_split(data_dir, "holdout");
            splits->test = read_split(data_dir, "test");
        }
        const std::string n = name;
        return n == "train" ? splits->train : n == "val" ? splits->val : n == "holdout" ? splits->holdout : splits->test;
    };

    stages.run("dataset", h_data,
               {split_path(data_dir, "train"), split_path(data_dir, "val"), split_path(data_dir, "holdout"),
                split_path(data_dir, "test"), data_dir / "manifest.json"},
               [&] {
                   splits = generate_splits(config.dataset, config.seed, config.workers);
                   write_splits(data_dir, *splits, config.dataset, config.seed);
               },
               summary.skipped_stages);

    std::optional<AutoencoderModel> model;
    stages.run(
        "train", h_train, {ckpt, model_dir / "loss_curve.csv"},
        [&] {
            const ModelConfig mc = resolve_model(config.model, config.dataset);
            TrainConfig tc = config.training;
            tc.seed = derive_seed(config.seed, "training");
            tc.workers = config.workers;
            const auto train_features = features_of(split("train"));
            const auto val_features = features_of(split("val"));
            const auto init = AutoencoderModel::create(mc, derive_seed(config.seed, "model"));
            TrainResult r = train(init, train_features, val_features, tc, [](const EpochRecord& e) {
                log_info("epoch " + std::to_string(e.epoch) + " train " + std::to_string(e.train_loss) + " val " +
                         std::to_string(e.val_loss));
            });
            if (r.diverged)
                throw TrainingFault(r.diagnostic);
            fs::create_directories(model_dir);
            write_loss_curve(model_dir / "loss_curve.csv", r.curve);
            Json echo = resolved;
            echo.erase("workers");
            save_checkpoint(ckpt, r.model, echo.dump());
            summary.best_epoch = r.best_epoch;
            model = std::move(r.model);
        },
        summary.skipped_stages);
    auto load_model = [&]() -> const AutoencoderModel& {
        if (!model)
            model = load_checkpoint(ckpt);
        return *model;
    };

    std::optional<DetectorThreshold> threshold;
    stages.run("calibrate", h_cal, {threshold_file},
               [&] {
                   threshold = calibrate(load_model(), features_of(split("train")), config.percentile, config.workers);
                   save_threshold(threshold_file, *threshold);
               },
               summary.skipped_stages);

    const fs::path summary_file = eval_dir / "summary.json";
    stages.run("evaluate", h_eval,
               {eval_dir / "accuracy_vs_inr.csv", eval_dir / "recon_error_hist.csv", summary_file},
               [&] {
                   if (!threshold)
                       threshold = load_threshold(threshold_file);
                   const AutoencoderModel& m = load_model();
                   fs::create_directories(eval_dir);
                   summary.report = evaluate(m, *threshold, split("test"), config.workers);
                   write_accuracy_csv(eval_dir / "accuracy_vs_inr.csv", summary.report);
                   write_error_csv(eval_dir / "recon_error_hist.csv", summary.report);

                   const auto holdout_errors = reconstruction_errors(m, features_of(split("holdout")), config.workers);
                   write_errors_csv(eval_dir / "holdout_errors.csv", holdout_errors);
                   std::size_t flagged = 0;
                   for (double e : holdout_errors)
                       flagged += exceeds(e, threshold->threshold);
                   summary.holdout_size = holdout_errors.size();
                   summary.holdout_false_positive_rate =
                       holdout_errors.empty() ? 0.0 : static_cast<double>(flagged) / holdout_errors.size();
                   summary.accuracy = summary.report.accuracy;
                   write_json_file(summary_file, Json{{"accuracy", summary.accuracy},
                                                      {"test_size", summary.report.total},
                                                      {"threshold", threshold->threshold},
                                                      {"holdout_size", summary.holdout_size},
                                                      {"holdout_false_positive_rate",
                                                       summary.holdout_false_positive_rate}});
               },
               summary.skipped_stages);

    if (summary.report.total == 0) {
        const Json s = read_json_file(summary_file);
        summary.accuracy = s.at("accuracy").get<double>();
        summary.holdout_size = s.at("holdout_size").get<std::size_t>();
        summary.holdout_false_positive_rate = s.at("holdout_false_positive_rate").get<double>();
    }
    return summary;
}

} // namespace rfiscope
