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

#include "rfiscope/lstm.hpp"

#include <cmath>
#include <stdexcept>

namespace rfiscope {

namespace {

double sigmoid(double x)
{
    if (x >= 0.0)
        return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void uniform_fill(Eigen::MatrixXd& m, double bound, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Column-major fill order, fixed for reproducible initialisation.
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = dist(rng);
}

} // namespace

LstmLayerParams LstmLayerParams::zeros(std::size_t input_dim, std::size_t hidden_dim)
{
    const auto I = static_cast<Eigen::Index>(input_dim);
    const auto H = static_cast<Eigen::Index>(hidden_dim);
    return {Eigen::MatrixXd::Zero(4 * H, I), Eigen::MatrixXd::Zero(4 * H, H), Eigen::VectorXd::Zero(4 * H)};
}

LstmLayerParams LstmLayerParams::random(std::size_t input_dim, std::size_t hidden_dim,
                                        std::mt19937_64& rng)
{
    LstmLayerParams p = zeros(input_dim, hidden_dim);
    const auto H = static_cast<Eigen::Index>(hidden_dim);
    uniform_fill(p.W, 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
    uniform_fill(p.U, 1.0 / std::sqrt(static_cast<double>(hidden_dim)), rng);
    p.b.segment(H, H).setOnes();
    return p;
}

LstmForward lstm_forward(const LstmLayerParams& layer, std::span<const Eigen::MatrixXd> inputs,
                         const LstmState* initial)
{
    const Eigen::Index H = layer.U.cols();
    const Eigen::Index I = layer.W.cols();
    if (layer.W.rows() != 4 * H || layer.U.rows() != 4 * H || layer.b.size() != 4 * H)
        throw std::invalid_argument("LSTM parameter shapes are inconsistent");
    if (inputs.empty())
        throw std::invalid_argument("LSTM input sequence is empty");
    const Eigen::Index B = inputs.front().cols();

    LstmForward out;
    LstmCache& cache = out.cache;
    if (initial) {
        if (initial->h.rows() != H || initial->c.rows() != H || initial->h.cols() != B ||
            initial->c.cols() != B)
            throw std::invalid_argument("LSTM initial state has the wrong shape");
        cache.initial = *initial;
    } else {
        cache.initial = {Eigen::MatrixXd::Zero(H, B), Eigen::MatrixXd::Zero(H, B)};
    }

    const std::size_t P = inputs.size();
    cache.inputs.reserve(P);
    cache.gates.reserve(P);
    cache.cells.reserve(P);
    cache.tanh_cells.reserve(P);
    cache.hidden.reserve(P);

    const Eigen::MatrixXd* h_prev = &cache.initial.h;
    const Eigen::MatrixXd* c_prev = &cache.initial.c;
    for (std::size_t t = 0; t < P; ++t) {
        const Eigen::MatrixXd& x = inputs[t];
        if (x.rows() != I || x.cols() != B)
            throw std::invalid_argument("LSTM input has the wrong shape at step " + std::to_string(t));

        Eigen::MatrixXd z = layer.W * x;
        z.noalias() += layer.U * (*h_prev);
        z.colwise() += layer.b;

        z.topRows(2 * H) = z.topRows(2 * H).unaryExpr(&sigmoid);
        z.middleRows(2 * H, H) = z.middleRows(2 * H, H).array().tanh();
        z.bottomRows(H) = z.bottomRows(H).unaryExpr(&sigmoid);

        Eigen::MatrixXd c = z.middleRows(H, H).cwiseProduct(*c_prev) +
                            z.topRows(H).cwiseProduct(z.middleRows(2 * H, H));
        Eigen::MatrixXd tc = c.array().tanh();
        Eigen::MatrixXd h = z.bottomRows(H).cwiseProduct(tc);

        cache.inputs.push_back(x);
        cache.gates.push_back(std::move(z));
        cache.cells.push_back(std::move(c));
        cache.tanh_cells.push_back(std::move(tc));
        cache.hidden.push_back(std::move(h));
        h_prev = &cache.hidden.back();
        c_prev = &cache.cells.back();
    }

    out.outputs = cache.hidden;
    out.final_state = {cache.hidden.back(), cache.cells.back()};
    return out;
}

std::vector<Eigen::MatrixXd> lstm_backward(const LstmLayerParams& layer, const LstmCache& cache,
                                           std::span<const Eigen::MatrixXd> d_outputs,
                                           LstmLayerParams& grads)
{
    const std::size_t P = cache.hidden.size();
    if (d_outputs.size() != P)
        throw std::invalid_argument("gradient sequence length does not match the forward pass");
    const Eigen::Index H = layer.U.cols();
    const Eigen::Index B = cache.initial.h.cols();

    std::vector<Eigen::MatrixXd> d_inputs(P);
    Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(H, B);
    Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(H, B);
    Eigen::MatrixXd dz(4 * H, B);

    for (std::size_t step = P; step-- > 0;) {
        const Eigen::MatrixXd& g = cache.gates[step];
        const auto gi = g.topRows(H).array();
        const auto gf = g.middleRows(H, H).array();
        const auto gg = g.middleRows(2 * H, H).array();
        const auto go = g.bottomRows(H).array();
        const auto tc = cache.tanh_cells[step].array();
        const Eigen::MatrixXd& c_prev = step > 0 ? cache.cells[step - 1] : cache.initial.c;
        const Eigen::MatrixXd& h_prev = step > 0 ? cache.hidden[step - 1] : cache.initial.h;

        const Eigen::ArrayXXd dh = d_outputs[step].array() + dh_next.array();
        const Eigen::ArrayXXd dc = dc_next.array() + dh * go * (1.0 - tc.square());

        dz.topRows(H) = (dc * gg * gi * (1.0 - gi)).matrix();
        dz.middleRows(H, H) = (dc * c_prev.array() * gf * (1.0 - gf)).matrix();
        dz.middleRows(2 * H, H) = (dc * gi * (1.0 - gg.square())).matrix();
        dz.bottomRows(H) = (dh * tc * go * (1.0 - go)).matrix();

        grads.W.noalias() += dz * cache.inputs[step].transpose();
        grads.U.noalias() += dz * h_prev.transpose();
        grads.b.noalias() += dz.rowwise().sum();

        d_inputs[step].noalias() = layer.W.transpose() * dz;
        dh_next.noalias() = layer.U.transpose() * dz;
        dc_next = (dc * gf).matrix();
    }
    return d_inputs;
}

} // namespace rfiscope
