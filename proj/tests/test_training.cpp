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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "gradient_check.hpp"
#include "rfiscope/errors.hpp"
#include "rfiscope/training.hpp"

using namespace rfiscope;

namespace {

constexpr std::size_t kDim = 8;
constexpr std::size_t kSteps = 4;

// A bump centred on a random position, constant over time, plus jitter.
std::vector<Eigen::MatrixXd> bumps(std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> centre(1.0, kDim - 2.0);
    std::normal_distribution<double> jitter(0.0, 0.01);
    std::vector<Eigen::MatrixXd> out;
    for (std::size_t n = 0; n < count; ++n) {
        const double c = centre(rng);
        Eigen::MatrixXd x(kDim, kSteps);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index t = 0; t < x.cols(); ++t)
                x(i, t) = std::exp(-0.5 * (i - c) * (i - c)) + jitter(rng);
        out.push_back(x);
    }
    return out;
}

// Two bumps in one frame only.
std::vector<Eigen::MatrixXd> disturbed(std::vector<Eigen::MatrixXd> clean, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> frame(0, kSteps - 1), pos(0, kDim - 1);
    for (auto& x : clean) {
        const int t = frame(rng);
        x(pos(rng), t) += 1.0;
        x(pos(rng), t) += 1.0;
    }
    return clean;
}

ModelConfig toy_config(double alpha = 0.001)
{
    ModelConfig c;
    c.input_dim = kDim;
    c.sequence_len = kSteps;
    c.encoder_hidden = {16, 8};
    c.decoder_hidden = {8, 16};
    c.alpha = alpha;
    return c;
}

TrainConfig quick(std::size_t epochs, double lr = 0.01)
{
    TrainConfig t;
    t.adam.learning_rate = lr;
    t.max_epochs = epochs;
    t.patience = epochs;
    t.batch_size = 10;
    t.seed = 4;
    return t;
}

double mean(const std::vector<double>& xs)
{
    double s = 0.0;
    for (double x : xs)
        s += x;
    return s / static_cast<double>(xs.size());
}

} // namespace

TEST(Training, AdamStepMatchesHandComputation)
{
    ModelConfig cfg = toy_config();
    AutoencoderModel model = AutoencoderModel::create(cfg, 1);
    const Parameters start = model.params;
    Parameters grads = model.params.zeros_like();
    grads.proj_bias(0) = 0.5;
    grads.proj_bias(1) = -2.0;
    AdamConfig ac;
    ac.learning_rate = 0.1;
    OptimizerState state = OptimizerState::for_parameters(model.params, ac);

    adam_step(state, model.params, grads);
    // One step: bias-corrected moments are g and g^2, so the step is lr * g / (|g| + eps).
    EXPECT_NEAR(model.params.proj_bias(0), start.proj_bias(0) - 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
    EXPECT_NEAR(model.params.proj_bias(1), start.proj_bias(1) + 0.1 * 2.0 / (2.0 + 1e-8), 1e-15);
    EXPECT_EQ(model.params.proj_bias(2), start.proj_bias(2));

    grads.proj_bias(0) = 1.5;
    adam_step(state, model.params, grads);
    const double m = 0.9 * (0.1 * 0.5) + 0.1 * 1.5;
    const double v = 0.999 * (0.001 * 0.25) + 0.001 * 2.25;
    const double m_hat = m / (1.0 - 0.81);
    const double v_hat = v / (1.0 - 0.999 * 0.999);
    const double expected = start.proj_bias(0) - 0.1 * 0.5 / (0.5 + 1e-8) - 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8);
    EXPECT_NEAR(model.params.proj_bias(0), expected, 1e-14);
    EXPECT_EQ(state.step, 2u);
}

TEST(Training, MemorizesSmallSet)
{
    const auto data = bumps(20, 1);
    AutoencoderModel model = AutoencoderModel::create(toy_config(0.0), 2);
    TrainConfig tc = quick(400, 0.01);
    tc.batch_size = 20;
    const TrainResult r = train(model, data, data, tc);
    ASSERT_FALSE(r.diverged) << r.diagnostic;
    // Adam jitters near the optimum; each quarter of the run still ends lower than the last.
    const std::size_t quarter = r.curve.size() / 4;
    for (std::size_t q = 1; q < 4; ++q)
        EXPECT_LT(r.curve[(q + 1) * quarter - 1].train_loss, r.curve[q * quarter - 1].train_loss);
    EXPECT_LT(r.curve.back().train_loss, 0.01 * r.curve.front().train_loss);
    EXPECT_LT(mean(reconstruction_errors(r.model, data)), 1e-3);
}

TEST(Training, TrainedErrorIsFarBelowUntrained)
{
    const auto train_set = bumps(50, 3);
    const auto val_set = bumps(20, 4);
    const AutoencoderModel untrained = AutoencoderModel::create(toy_config(), 5);
    const TrainResult r = train(untrained, train_set, val_set, quick(150));
    const double before = mean(reconstruction_errors(untrained, val_set));
    const double after = mean(reconstruction_errors(r.model, val_set));
    EXPECT_LT(after, 0.1 * before);
}

TEST(Training, CleanLossBelowDisturbedLoss)
{
    const auto train_set = bumps(50, 6);
    const auto val_set = bumps(30, 7);
    const auto anomalous = disturbed(bumps(30, 8), 9);
    const TrainResult r = train(AutoencoderModel::create(toy_config(), 10), train_set, val_set, quick(150));
    EXPECT_LT(loss(r.model, val_set).value, loss(r.model, anomalous).value);
}

TEST(Training, FixedSeedIsReproducible)
{
    const auto train_set = bumps(25, 11);
    const auto val_set = bumps(10, 12);
    const AutoencoderModel init = AutoencoderModel::create(toy_config(), 13);
    TrainConfig tc = quick(5);
    const TrainResult a = train(init, train_set, val_set, tc);
    tc.workers = 3;
    const TrainResult b = train(init, train_set, val_set, tc);
    const auto pa = a.model.params.tensors();
    const auto pb = b.model.params.tensors();
    for (std::size_t t = 0; t < pa.size(); ++t)
        EXPECT_TRUE(std::equal(pa[t].begin(), pa[t].end(), pb[t].begin(), pb[t].end()));
    ASSERT_EQ(a.curve.size(), b.curve.size());
    for (std::size_t e = 0; e < a.curve.size(); ++e)
        EXPECT_EQ(a.curve[e].val_loss, b.curve[e].val_loss);
}

TEST(Training, EarlyStoppingKeepsBestEpoch)
{
    const auto train_set = bumps(20, 14);
    const auto val_set = bumps(10, 15);
    TrainConfig tc = quick(200, 0.05);
    tc.patience = 3;
    const TrainResult r = train(AutoencoderModel::create(toy_config(), 16), train_set, val_set, tc);
    ASSERT_FALSE(r.curve.empty());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    for (const auto& e : r.curve)
        if (e.val_loss < best) {
            best = e.val_loss;
            best_epoch = e.epoch;
        }
    EXPECT_EQ(r.best_epoch, best_epoch);
    EXPECT_NEAR(loss(r.model, val_set).value, best, 1e-12);
    if (r.curve.size() < tc.max_epochs)
        EXPECT_EQ(r.curve.size(), best_epoch + tc.patience);
}

TEST(Training, NonFiniteDataStopsWithDiagnostic)
{
    auto train_set = bumps(10, 17);
    train_set[3](0, 0) = std::numeric_limits<double>::quiet_NaN();
    const auto val_set = bumps(5, 18);
    const AutoencoderModel init = AutoencoderModel::create(toy_config(), 19);
    const TrainResult r = train(init, train_set, val_set, quick(3));
    EXPECT_TRUE(r.diverged);
    EXPECT_FALSE(r.diagnostic.empty());
    EXPECT_TRUE(r.model.params.all_finite());
}

TEST(Training, LargerAlphaGivesSparserCodes)
{
    const auto train_set = bumps(40, 20);
    const auto val_set = bumps(20, 21);
    std::vector<double> l1;
    for (double alpha : {1e-4, 1e-3, 1e-2}) {
        const TrainResult r = train(AutoencoderModel::create(toy_config(alpha), 22), train_set, val_set, quick(100));
        l1.push_back(mean(loss(r.model, val_set).code_l1));
    }
    EXPECT_GT(l1[0], l1[1]);
    EXPECT_GT(l1[1], l1[2]);
}

TEST(Training, RejectsEmptySplitsAndZeroBatch)
{
    const auto data = bumps(4, 23);
    const AutoencoderModel init = AutoencoderModel::create(toy_config(), 24);
    EXPECT_THROW(train(init, {}, data, quick(1)), std::invalid_argument);
    TrainConfig tc = quick(1);
    tc.batch_size = 0;
    EXPECT_THROW(train(init, data, data, tc), ConfigError);
}

TEST(Training, LossCurveCsv)
{
    const std::vector<EpochRecord> curve{{1, 2.5, 3.0}, {2, 1.5, 2.0}};
    const auto path = std::filesystem::temp_directory_path() / "rfiscope_curve.csv";
    write_loss_curve(path, curve);
    std::ifstream is(path);
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "epoch,train_loss,val_loss");
    std::getline(is, line);
    EXPECT_EQ(line, "1,2.5,3");
    std::filesystem::remove(path);
}
