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

#include "rfiscope/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rfiscope/errors.hpp"

namespace rfiscope {

OptimizerState OptimizerState::for_parameters(const Parameters& params, const AdamConfig& config)
{
    return {config, params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(OptimizerState& state, Parameters& params, const Parameters& grads)
{
    const AdamConfig& c = state.config;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);

    auto p = params.tensors();
    auto m = state.first_moment.tensors();
    auto v = state.second_moment.tensors();
    const auto g = grads.tensors();
    if (p.size() != g.size() || p.size() != m.size())
        throw std::invalid_argument("optimizer state does not match the parameters");

    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p[i].size(); ++j) {
            const double gj = g[i][j];
            m[i][j] = c.beta1 * m[i][j] + (1.0 - c.beta1) * gj;
            v[i][j] = c.beta2 * v[i][j] + (1.0 - c.beta2) * gj * gj;
            const double m_hat = m[i][j] / bc1;
            const double v_hat = v[i][j] / bc2;
            p[i][j] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

TrainResult train(AutoencoderModel model, std::span<const Eigen::MatrixXd> train_set,
                  std::span<const Eigen::MatrixXd> val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch)
{
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("training and validation splits must be non-empty");
    if (config.batch_size == 0)
        throw ConfigError("batch size must be positive");

    TrainResult result;
    result.model = model;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    OptimizerState opt = OptimizerState::for_parameters(model.params, config.adam);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Eigen::MatrixXd> batch;

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double weighted = 0.0;
        try {
            for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
                const std::size_t end = std::min(order.size(), start + config.batch_size);
                batch.clear();
                for (std::size_t i = start; i < end; ++i)
                    batch.push_back(train_set[order[i]]);
                LossResult batch_loss;
                const Parameters grads = backprop(model, batch, &batch_loss, config.workers);
                if (!std::isfinite(batch_loss.value))
                    throw TrainingFault("non-finite training loss at epoch " + std::to_string(epoch));
                weighted += batch_loss.value * static_cast<double>(end - start);
                adam_step(opt, model.params, grads);
            }
        } catch (const TrainingFault& e) {
            result.diverged = true;
            result.diagnostic = e.what();
            return result;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = weighted / static_cast<double>(order.size());
        rec.val_loss = loss(model, val_set).value;
        result.curve.push_back(rec);
        if (on_epoch)
            on_epoch(rec);

        if (!std::isfinite(rec.val_loss) || !model.params.all_finite()) {
            result.diverged = true;
            result.diagnostic = "non-finite validation loss at epoch " + std::to_string(epoch);
            return result;
        }
        if (rec.val_loss < best_val) {
            best_val = rec.val_loss;
            result.best_epoch = epoch;
            result.model = model;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    return result;
}

void write_loss_curve(const std::filesystem::path& path, std::span<const EpochRecord> curve)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.precision(17);
    os << "epoch,train_loss,val_loss\n";
    for (const auto& r : curve)
        os << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
}

} // namespace rfiscope
