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

#ifndef RFISCOPE_LSTM_HPP
#define RFISCOPE_LSTM_HPP

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rfiscope {

/// One LSTM layer. Gate blocks are stacked in the order input, forget,
/// cell, output; each block has hidden_dim rows.
struct LstmLayerParams {
    Eigen::MatrixXd W; // 4H x I
    Eigen::MatrixXd U; // 4H x H
    Eigen::VectorXd b; // 4H

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(W.cols()); }
    std::size_t hidden_dim() const noexcept { return static_cast<std::size_t>(U.cols()); }
    std::size_t parameter_count() const noexcept
    {
        return static_cast<std::size_t>(W.size() + U.size() + b.size());
    }

    static LstmLayerParams zeros(std::size_t input_dim, std::size_t hidden_dim);

    /// Uniform(+-1/sqrt(fan_in)) weights, zero biases, forget bias 1.
    static LstmLayerParams random(std::size_t input_dim, std::size_t hidden_dim, std::mt19937_64& rng);
};

/// Hidden and cell state, one column per batch entry.
struct LstmState {
    Eigen::MatrixXd h;
    Eigen::MatrixXd c;
};

/// Activations retained by the forward pass for backpropagation.
struct LstmCache {
    std::vector<Eigen::MatrixXd> inputs;  // x_t, I x B
    std::vector<Eigen::MatrixXd> gates;   // post-activation [i; f; g; o], 4H x B
    std::vector<Eigen::MatrixXd> cells;   // c_t
    std::vector<Eigen::MatrixXd> tanh_cells;
    std::vector<Eigen::MatrixXd> hidden;  // h_t
    LstmState initial;
};

struct LstmForward {
    std::vector<Eigen::MatrixXd> outputs; // h_t for t = 0..P-1
    LstmState final_state;
    LstmCache cache;
};

/// Runs the layer over a sequence of (input_dim x batch) matrices.
/// A null `initial` state means zeros. Throws std::invalid_argument on
/// shape mismatch.
LstmForward lstm_forward(const LstmLayerParams& layer, std::span<const Eigen::MatrixXd> inputs,
                         const LstmState* initial = nullptr);

/// Backpropagation through time. `d_outputs[t]` is dL/dh_t from above.
/// Parameter gradients are accumulated into `grads`; the return value
/// holds dL/dx_t.
std::vector<Eigen::MatrixXd> lstm_backward(const LstmLayerParams& layer, const LstmCache& cache,
                                           std::span<const Eigen::MatrixXd> d_outputs,
                                           LstmLayerParams& grads);

} // namespace rfiscope

#endif
