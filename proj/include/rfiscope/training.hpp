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

#ifndef RFISCOPE_TRAINING_HPP
#define RFISCOPE_TRAINING_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rfiscope/autoencoder.hpp"

namespace rfiscope {

struct AdamConfig {
    double learning_rate = 0.02;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators shaped like the model parameters.
struct OptimizerState {
    AdamConfig config;
    Parameters first_moment;
    Parameters second_moment;
    std::uint64_t step = 0;

    static OptimizerState for_parameters(const Parameters& params, const AdamConfig& config);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(OptimizerState& state, Parameters& params, const Parameters& grads);

struct TrainConfig {
    AdamConfig adam;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    /// Stop after this many epochs without a validation improvement.
    std::size_t patience = 10;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    /// Parameters of the epoch with the lowest validation loss.
    AutoencoderModel model;
    std::vector<EpochRecord> curve;
    std::size_t best_epoch = 0;
    bool diverged = false;
    std::string diagnostic;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch Adam on clean sequences (features D x P each), shuffled every
/// epoch from `config.seed`, with early stopping on validation loss. A
/// non-finite loss or gradient stops training; the result then carries the
/// last good model and diverged = true.
TrainResult train(AutoencoderModel model, std::span<const Eigen::MatrixXd> train_set,
                  std::span<const Eigen::MatrixXd> val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

void write_loss_curve(const std::filesystem::path& path, std::span<const EpochRecord> curve);

} // namespace rfiscope

#endif
