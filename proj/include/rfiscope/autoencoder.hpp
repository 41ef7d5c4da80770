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

#ifndef RFISCOPE_AUTOENCODER_HPP
#define RFISCOPE_AUTOENCODER_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfiscope/lstm.hpp"

namespace rfiscope {

struct ModelConfig {
    std::size_t input_dim = 0;
    std::size_t sequence_len = 10;
    std::vector<std::size_t> encoder_hidden{256, 64, 64};
    std::vector<std::size_t> decoder_hidden{64, 64, 256};
    double alpha = 0.001;
    /// Penalise only the last code step instead of all P steps.
    bool l1_last_only = false;

    std::size_t code_dim() const { return encoder_hidden.empty() ? 0 : encoder_hidden.back(); }
    void validate() const;
};

/// Trainable tensors of the autoencoder. Gradients use the same type.
struct Parameters {
    std::vector<LstmLayerParams> encoder;
    std::vector<LstmLayerParams> decoder;
    Eigen::MatrixXd proj_weight; // D x H_dec
    Eigen::VectorXd proj_bias;   // D

    Parameters zeros_like() const;
    std::size_t count() const;

    /// Every tensor as a flat view, in checkpoint order.
    std::vector<std::span<double>> tensors();
    std::vector<std::span<const double>> tensors() const;

    Parameters& operator+=(const Parameters& other);
    bool all_finite() const;
};

/// LSTM encoder/decoder stacks with an affine read-out.
///
/// The decoder consumes the code sequence in reverse, so decoder step t
/// sees h_{P-1} first and reconstructs input step P-1-t.
struct AutoencoderModel {
    ModelConfig config;
    Parameters params;

    static AutoencoderModel create(const ModelConfig& config, std::uint64_t seed);
};

/// Code sequence h, code_dim x P, for features D x P.
Eigen::MatrixXd encode(const AutoencoderModel& model, const Eigen::MatrixXd& features);

/// Decoder output D x P in decoder step order: column t estimates input
/// column P-1-t.
Eigen::MatrixXd decode(const AutoencoderModel& model, const Eigen::MatrixXd& code);

/// decode(encode(x)) with columns put back in input order.
Eigen::MatrixXd reconstruct(const AutoencoderModel& model, const Eigen::MatrixXd& features);

struct LossResult {
    /// (1/T) sum_t ( ||i - i_hat||^2 + alpha ||h||_1 ), T = batch size.
    double value = 0.0;
    double reconstruction_part = 0.0;
    double sparsity_part = 0.0;
    /// ||i - i_hat||^2 / (P D) per sequence; the detector statistic.
    std::vector<double> reconstruction_errors;
    std::vector<double> code_l1;
};

LossResult loss(const AutoencoderModel& model, std::span<const Eigen::MatrixXd> batch);

/// Per-sequence reconstruction errors only, evaluated in fixed-size chunks.
std::vector<double> reconstruction_errors(const AutoencoderModel& model,
                                          std::span<const Eigen::MatrixXd> sequences,
                                          std::size_t workers = 1);

/// Gradient of loss() with respect to every parameter by backpropagation
/// through both stacks. The L1 subgradient is alpha * sign(h), zero at 0.
/// The batch is processed in fixed chunks and reduced in chunk order, so
/// `workers` never changes the result. Throws TrainingFault on a
/// non-finite gradient.
Parameters backprop(const AutoencoderModel& model, std::span<const Eigen::MatrixXd> batch,
                    LossResult* loss_out = nullptr, std::size_t workers = 1);

void save_checkpoint(const std::filesystem::path& path, const AutoencoderModel& model,
                     const std::string& config_echo = "{}");
AutoencoderModel load_checkpoint(const std::filesystem::path& path, std::string* config_echo = nullptr);

} // namespace rfiscope

#endif
