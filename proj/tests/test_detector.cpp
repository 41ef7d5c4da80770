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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "rfiscope/detector.hpp"
#include "rfiscope/errors.hpp"

using namespace rfiscope;

namespace {

ImageSequence labelled(Label label, AnomalyKind kind, double inr, std::uint32_t jammers)
{
    ImageSequence s;
    s.size = {2, 2};
    s.label = label;
    s.kind = kind;
    s.meta.inr_db = inr;
    s.meta.n_jammers = jammers;
    s.frames.assign(1, Eigen::MatrixXf::Zero(2, 2));
    return s;
}

// Hand-rolled type-7 quantile on an already sorted sample.
double quantile_by_hand(const std::vector<double>& sorted, double p)
{
    const double pos = (sorted.size() - 1) * p / 100.0;
    const std::size_t below = static_cast<std::size_t>(pos);
    if (below + 1 >= sorted.size())
        return sorted.back();
    return sorted[below] * (1.0 - (pos - below)) + sorted[below + 1] * (pos - below);
}

} // namespace

TEST(Detector, PercentileOfOneToHundred)
{
    std::vector<double> errors(100);
    std::iota(errors.begin(), errors.end(), 1.0);
    std::shuffle(errors.begin(), errors.end(), std::mt19937_64(3));
    EXPECT_NEAR(percentile_linear(errors, 95.0), 95.05, 1e-12);
    const DetectorThreshold t = calibrate_from_errors(errors, 95.0);
    EXPECT_NEAR(t.threshold, 95.05, 1e-12);
    EXPECT_EQ(t.calibration_size, 100u);
    EXPECT_EQ(t.percentile, 95.0);
}

TEST(Detector, PercentileMatchesHandQuantile)
{
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> dist(3.0);
    for (std::size_t n : {1u, 2u, 7u, 200u}) {
        std::vector<double> xs(n);
        for (double& x : xs)
            x = dist(rng);
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        for (double p : {0.0, 5.0, 50.0, 95.0, 99.0, 100.0})
            EXPECT_NEAR(percentile_linear(xs, p), quantile_by_hand(sorted, p), 1e-15);
    }
}

TEST(Detector, ConstantErrorsAndMonotonicity)
{
    const std::vector<double> same(37, 0.125);
    EXPECT_EQ(calibrate_from_errors(same, 95.0).threshold, 0.125);

    std::mt19937_64 rng(1);
    std::lognormal_distribution<double> dist;
    std::vector<double> xs(300);
    for (double& x : xs)
        x = dist(rng);
    EXPECT_GE(calibrate_from_errors(xs, 99.0).threshold, calibrate_from_errors(xs, 95.0).threshold);
}

TEST(Detector, RoughlyFivePercentOfCalibrationExceeds)
{
    std::mt19937_64 rng(2);
    std::gamma_distribution<double> dist(2.0, 1.0);
    for (std::size_t n : {100u, 257u, 1000u}) {
        std::vector<double> xs(n);
        for (double& x : xs)
            x = dist(rng);
        const double thr = calibrate_from_errors(xs, 95.0).threshold;
        const auto above = static_cast<std::size_t>(std::count_if(xs.begin(), xs.end(), [&](double e) { return exceeds(e, thr); }));
        const auto target = static_cast<std::size_t>(std::ceil(0.05 * n));
        EXPECT_LE(above, target + 1);
        EXPECT_GE(above + 1, target);
    }
}

TEST(Detector, InvalidCalibration)
{
    EXPECT_THROW(calibrate_from_errors({}, 95.0), std::invalid_argument);
    const std::vector<double> xs{1.0, 2.0};
    EXPECT_THROW(calibrate_from_errors(xs, 0.0), std::invalid_argument);
    EXPECT_THROW(calibrate_from_errors(xs, 100.0), std::invalid_argument);
    EXPECT_THROW(percentile_linear({}, 50.0), std::invalid_argument);
}

TEST(Detector, StrictBoundary)
{
    EXPECT_FALSE(exceeds(0.5, 0.5));
    EXPECT_TRUE(exceeds(std::nextafter(0.5, 1.0), 0.5));
    EXPECT_FALSE(exceeds(0.49, 0.5));
}

TEST(Detector, ClassifyUsesModelError)
{
    ModelConfig cfg;
    cfg.input_dim = 3;
    cfg.sequence_len = 2;
    cfg.encoder_hidden = {2};
    cfg.decoder_hidden = {2};
    AutoencoderModel model = AutoencoderModel::create(cfg, 1);
    model.params.proj_weight.setZero();
    model.params.proj_bias.setZero();
    const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(3, 2, 0.5);

    DetectorThreshold t;
    t.threshold = 0.25;
    Classification c = classify(model, t, x);
    EXPECT_DOUBLE_EQ(c.error, 0.25);
    EXPECT_EQ(c.decision, Label::Clean);
    t.threshold = std::nextafter(0.25, 0.0);
    EXPECT_EQ(classify(model, t, x).decision, Label::Anomalous);
    EXPECT_THROW(classify(model, t, Eigen::MatrixXd::Zero(4, 2)), std::invalid_argument);
}

TEST(Detector, EvaluationTable)
{
    std::vector<ImageSequence> test;
    std::vector<double> errors;
    // Four clean sequences, one above the threshold.
    for (double e : {0.1, 0.2, 0.3, 0.9}) {
        test.push_back(labelled(Label::Clean, AnomalyKind::None, std::nan(""), 0));
        errors.push_back(e);
    }
    // Transient at 10 dB: one of two detected. Static at 10 dB: both. Static at 20 dB with 2 jammers: one.
    test.push_back(labelled(Label::Anomalous, AnomalyKind::Transient, 10.0, 1));
    errors.push_back(0.4);
    test.push_back(labelled(Label::Anomalous, AnomalyKind::Transient, 10.0, 1));
    errors.push_back(0.8);
    test.push_back(labelled(Label::Anomalous, AnomalyKind::Static, 10.0, 1));
    errors.push_back(0.6);
    test.push_back(labelled(Label::Anomalous, AnomalyKind::Static, 10.0, 1));
    errors.push_back(0.7);
    test.push_back(labelled(Label::Anomalous, AnomalyKind::Static, 20.0, 2));
    errors.push_back(0.5);
    test.push_back(labelled(Label::Unlabeled, AnomalyKind::None, std::nan(""), 0));
    errors.push_back(5.0);

    DetectorThreshold t;
    t.threshold = 0.5;
    const EvaluationReport r = evaluate_errors(test, errors, t);
    EXPECT_EQ(r.skipped, 1u);
    EXPECT_EQ(r.total, 9u);
    // Correct: 3 clean, 1 transient, 2 static at 10 dB, 0 at 20 dB.
    EXPECT_DOUBLE_EQ(r.accuracy, 6.0 / 9.0);
    EXPECT_EQ(r.errors.size(), 9u);

    const CellAccuracy* transient = r.find(10.0, "transient", 1);
    ASSERT_NE(transient, nullptr);
    EXPECT_DOUBLE_EQ(transient->accuracy, 0.5);
    EXPECT_EQ(transient->n, 2u);
    EXPECT_DOUBLE_EQ(r.find(10.0, "static", 1)->accuracy, 1.0);
    EXPECT_DOUBLE_EQ(r.find(20.0, "static", 2)->accuracy, 0.0);
    EXPECT_EQ(r.find(20.0, "static", 1), nullptr);

    const CellAccuracy* pooled = r.find(10.0, "all", 0);
    ASSERT_NE(pooled, nullptr);
    EXPECT_DOUBLE_EQ(pooled->accuracy, 6.0 / 8.0);
    EXPECT_EQ(pooled->n, 8u);
    EXPECT_DOUBLE_EQ(r.kind_accuracy(10.0, "static"), 1.0);

    const auto clean = std::find_if(r.table.begin(), r.table.end(), [](const CellAccuracy& c) { return c.kind == "clean"; });
    ASSERT_NE(clean, r.table.end());
    EXPECT_DOUBLE_EQ(clean->accuracy, 0.75);
}

TEST(Detector, PermutationInvariantAndPerfectSeparator)
{
    std::vector<ImageSequence> test;
    std::vector<double> errors;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> low(0.0, 0.4), high(0.6, 1.0);
    const AnomalyKind kinds[] = {AnomalyKind::Transient, AnomalyKind::Static, AnomalyKind::Moving};
    for (int i = 0; i < 60; ++i) {
        if (i % 3 == 0) {
            test.push_back(labelled(Label::Clean, AnomalyKind::None, std::nan(""), 0));
            errors.push_back(low(rng));
        } else {
            test.push_back(labelled(Label::Anomalous, kinds[i % 3], 10.0 * (i % 4), 1 + i % 2));
            errors.push_back(high(rng));
        }
    }
    DetectorThreshold t;
    t.threshold = 0.5;
    const EvaluationReport a = evaluate_errors(test, errors, t);
    EXPECT_EQ(a.accuracy, 1.0);

    std::vector<std::size_t> order(test.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<ImageSequence> shuffled;
    std::vector<double> shuffled_errors;
    for (std::size_t i : order) {
        shuffled.push_back(test[i]);
        shuffled_errors.push_back(errors[i]);
    }
    const EvaluationReport b = evaluate_errors(shuffled, shuffled_errors, t);
    ASSERT_EQ(a.table.size(), b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i) {
        EXPECT_EQ(a.table[i].kind, b.table[i].kind);
        EXPECT_EQ(a.table[i].n_jammers, b.table[i].n_jammers);
        EXPECT_EQ(a.table[i].accuracy, b.table[i].accuracy);
        EXPECT_EQ(a.table[i].n, b.table[i].n);
    }
}

TEST(Detector, CsvAndThresholdFiles)
{
    std::vector<ImageSequence> test{labelled(Label::Clean, AnomalyKind::None, std::nan(""), 0),
                                    labelled(Label::Anomalous, AnomalyKind::Moving, 30.0, 3)};
    const std::vector<double> errors{0.125, 0.75};
    DetectorThreshold t;
    t.threshold = 0.5;
    t.calibration_size = 640;
    const EvaluationReport r = evaluate_errors(test, errors, t);

    const auto dir = std::filesystem::temp_directory_path() / "rfiscope_detector_io";
    std::filesystem::create_directories(dir);
    write_accuracy_csv(dir / "acc.csv", r);
    write_error_csv(dir / "err.csv", r);
    save_threshold(dir / "thr.json", t);

    std::ifstream acc(dir / "acc.csv");
    std::string line;
    std::getline(acc, line);
    EXPECT_EQ(line, "inr_db,kind,n_jammers,accuracy,n");
    std::getline(acc, line);
    EXPECT_EQ(line, "30,moving,3,1,1");

    std::ifstream err(dir / "err.csv");
    std::getline(err, line);
    EXPECT_EQ(line, "error,label");
    std::getline(err, line);
    EXPECT_EQ(line, "0.125,clean");

    const DetectorThreshold back = load_threshold(dir / "thr.json");
    EXPECT_EQ(back.threshold, 0.5);
    EXPECT_EQ(back.calibration_size, 640u);
    std::ofstream(dir / "bad.json") << "{\"threshold\": }";
    EXPECT_THROW(load_threshold(dir / "bad.json"), FormatError);
    std::filesystem::remove_all(dir);
}
