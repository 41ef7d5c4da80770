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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rfiscope/errors.hpp"
#include "rfiscope/pipeline.hpp"
#include "rfiscope/scenario.hpp"

using namespace rfiscope;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("rfiscope_pipeline_" + name);
    fs::remove_all(p);
    return p;
}

PipelineConfig tiny_config()
{
    PipelineConfig c;
    c.seed = 5;
    c.dataset.sim.geometry.n_y = 4;
    c.dataset.sim.geometry.n_z = 4;
    c.dataset.sim.image = {8, 8};
    c.dataset.sim.frames = 3;
    c.dataset.sim.snapshots = 100;
    c.dataset.grid = {3, 3, GridSpec{}.span};
    c.dataset.train_snr_db = {0.0, 10.0};
    c.dataset.val_snr_db = {5.0};
    c.dataset.holdout_snr_db = {0.0};
    c.dataset.test_positions = 2;
    c.dataset.test_clean_replicates = 2;
    c.dataset.plan.inr_db = {0.0, 20.0};
    c.dataset.plan.counts = {1};
    c.dataset.plan.min_offset_bins = 1;
    c.model.encoder_hidden = {6, 4};
    c.model.decoder_hidden = {4, 6};
    c.training.max_epochs = 2;
    c.training.batch_size = 8;
    return c;
}

Json single_soi(int u, int v, std::uint64_t seed)
{
    return Json{{"geometry", {{"n_y", 8}, {"n_z", 8}}},
                {"image", {{"u_fft", 64}, {"v_fft", 64}}},
                {"snapshots", 1000},
                {"seed", seed},
                {"sources", Json::array({{{"kind", "soi"}, {"power_db", 10.0}, {"bin", {u, v}}}})}};
}

} // namespace

TEST(Config, SweepSyntax)
{
    const auto full = parse_sweep("-9:20:1");
    ASSERT_EQ(full.size(), 30u);
    EXPECT_EQ(full.front(), -9.0);
    EXPECT_EQ(full.back(), 20.0);
    EXPECT_EQ(parse_sweep("0:30:10"), (std::vector<double>{0.0, 10.0, 20.0, 30.0}));
    EXPECT_EQ(parse_sweep("0,10,20.5"), (std::vector<double>{0.0, 10.0, 20.5}));
    EXPECT_EQ(parse_sweep("-9:20:3").size(), 10u);
    EXPECT_THROW(parse_sweep("0:10"), ConfigError);
    EXPECT_THROW(parse_sweep("0:10:0"), ConfigError);
    EXPECT_THROW(parse_sweep("1,x"), ConfigError);
    EXPECT_THROW(parse_sweep(""), ConfigError);
}

TEST(Config, JsonRoundTripAndOverlay)
{
    const PipelineConfig base = tiny_config();
    const Json j = to_json(base);
    EXPECT_EQ(to_json(pipeline_config_from_json(j)), j);

    // Partial overlays change only the named fields.
    const PipelineConfig c =
        pipeline_config_from_json(Json{{"training", {{"learning_rate", 0.5}}}, {"dataset", {{"frames", 7}}}}, base);
    EXPECT_EQ(c.training.adam.learning_rate, 0.5);
    EXPECT_EQ(c.training.batch_size, base.training.batch_size);
    EXPECT_EQ(c.dataset.sim.frames, 7u);
    EXPECT_EQ(c.dataset.sim.snapshots, base.dataset.sim.snapshots);

    EXPECT_THROW(pipeline_config_from_json(Json{{"sed", 1}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(Json{{"model", {{"alpha", "high"}}}}), ConfigError);
    EXPECT_THROW(pipeline_config_from_json(Json{{"dataset", {{"kinds", {"loud"}}}}}), ConfigError);
}

TEST(Config, DefaultsMatchDeskScale)
{
    const PipelineConfig c;
    EXPECT_EQ(c.dataset.sim.image.u_fft, 32u);
    EXPECT_EQ(c.dataset.grid.n_u * c.dataset.grid.n_v, 64u);
    EXPECT_EQ(c.dataset.train_snr_db.size(), 10u);
    EXPECT_EQ(c.dataset.sim.frames, 10u);
    EXPECT_EQ(c.percentile, 95.0);
}

TEST(Config, DigestIsStable)
{
    const Json a{{"x", 1}, {"y", {1.5, 2.5}}};
    EXPECT_EQ(json_digest(a), json_digest(Json::parse(a.dump())));
    EXPECT_NE(json_digest(a), json_digest(Json{{"x", 2}, {"y", {1.5, 2.5}}}));
    EXPECT_EQ(json_digest(a).size(), 16u);
}

TEST(Scenario, SingleSourcePeakMatchesTruth)
{
    for (const auto& [u, v] : {std::pair{0, 0}, {5, -7}, {-20, 11}, {14, 14}}) {
        const Scenario s = scenario_from_json(single_soi(u, v, 3));
        const auto images = scenario_images(s);
        const Json truth = scenario_truth(s);
        const Json bin = truth["frames"][0]["sources"][0]["bin"];
        EXPECT_EQ(images.front().argmax(), (Bin{bin[0].get<int>(), bin[1].get<int>()}));
        EXPECT_EQ(truth["look_bin"], Json({u, v}));
    }
}

TEST(Scenario, NoSourceImageIsFlat)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Json j = single_soi(0, 0, seed);
        j["sources"] = Json::array();
        j["snapshots"] = 10000;
        const Scenario s = scenario_from_json(j);
        const DirtyImage img = scenario_images(s).front();
        double sum = 0.0, peak = 0.0;
        std::size_t count = 0;
        for (Eigen::Index r = 0; r < img.pixels.rows(); ++r)
            for (Eigen::Index c = 0; c < img.pixels.cols(); ++c)
                if (img.valid(r, c)) {
                    sum += img.pixels(r, c);
                    peak = std::max(peak, img.pixels(r, c));
                    ++count;
                }
        EXPECT_LT(peak / (sum / static_cast<double>(count)), 5.0) << "seed " << seed;
    }
}

TEST(Scenario, TransientTruthAndErrors)
{
    Json j = single_soi(2, 3, 1);
    j["frames"] = 3;
    j["sources"].push_back({{"kind", "rfi"}, {"power_db", 20.0}, {"bin", {-10, 8}}, {"lifetime", {1}}});
    const Scenario s = scenario_from_json(j);
    const Json truth = scenario_truth(s);
    EXPECT_EQ(truth["frames"][0]["sources"].size(), 1u);
    EXPECT_EQ(truth["frames"][1]["sources"].size(), 2u);
    EXPECT_EQ(truth["frames"][2]["sources"].size(), 1u);
    EXPECT_EQ(scenario_from_json(scenario_to_json(s)).sources.size(), 2u);

    Json bad = single_soi(0, 0, 1);
    bad["colour"] = "red";
    EXPECT_THROW(scenario_from_json(bad), ConfigError);
    bad = single_soi(0, 0, 1);
    bad["sources"][0].erase("bin");
    EXPECT_THROW(scenario_from_json(bad), ConfigError);
    bad = single_soi(0, 0, 1);
    bad["sources"][0]["lifetime"] = {4};
    EXPECT_THROW(scenario_from_json(bad), ConfigError);
    EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(Pipeline, SplitsAreDisjointAndSized)
{
    const PipelineConfig c = tiny_config();
    const DatasetSplits s = generate_splits(c.dataset, c.seed, 1);
    EXPECT_EQ(s.train.size(), 9u * 2u);
    EXPECT_EQ(s.val.size(), 9u);
    EXPECT_EQ(s.holdout.size(), 9u);
    // Clean test sequences then one anomalous sequence per position and cell.
    EXPECT_EQ(s.test.size(), 2u * 2u + 2u * c.dataset.plan.cells());
    std::set<std::uint64_t> seeds;
    for (const auto* split : {&s.train, &s.val, &s.holdout, &s.test})
        for (const auto& q : *split)
            seeds.insert(q.meta.seed);
    EXPECT_EQ(seeds.size(), s.train.size() + s.val.size() + s.holdout.size() + s.test.size());
}

TEST(Pipeline, ResumeSkipsCompletedStages)
{
    const fs::path out = fresh_dir("resume");
    PipelineConfig c = tiny_config();
    const PipelineSummary first = run_pipeline(c, out, false);
    EXPECT_TRUE(first.skipped_stages.empty());
    EXPECT_GT(first.report.total, 0u);

    const PipelineSummary again = run_pipeline(c, out, true);
    EXPECT_EQ(again.skipped_stages, (std::vector<std::string>{"dataset", "train", "calibrate", "evaluate"}));
    EXPECT_EQ(again.accuracy, first.accuracy);

    c.percentile = 90.0;
    const PipelineSummary changed = run_pipeline(c, out, true);
    EXPECT_EQ(changed.skipped_stages, (std::vector<std::string>{"dataset", "train"}));

    fs::remove(out / "model" / "model.ckpt");
    const PipelineSummary repaired = run_pipeline(c, out, true);
    // A missing output re-runs only its stage; downstream hashes depend on configuration alone.
    EXPECT_EQ(repaired.skipped_stages, (std::vector<std::string>{"dataset", "calibrate", "evaluate"}));
    EXPECT_TRUE(fs::exists(out / "model" / "model.ckpt"));
    EXPECT_TRUE(fs::exists(out / "run.json"));
    fs::remove_all(out);
}

TEST(Pipeline, StageFailureNamesTheStage)
{
    PipelineConfig c = tiny_config();
    c.training.batch_size = 0;
    const fs::path out = fresh_dir("failure");
    try {
        run_pipeline(c, out, false);
        FAIL() << "expected a stage failure";
    } catch (const StageFailure& e) {
        EXPECT_EQ(e.stage(), "train");
    }
    c = tiny_config();
    c.dataset.sim.snapshots = 0;
    try {
        run_pipeline(c, out, false);
        FAIL() << "expected a stage failure";
    } catch (const StageFailure& e) {
        EXPECT_EQ(e.stage(), "dataset");
    }
    fs::remove_all(out);
}
