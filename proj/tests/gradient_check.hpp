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

#ifndef RFISCOPE_TESTS_GRADIENT_CHECK_HPP
#define RFISCOPE_TESTS_GRADIENT_CHECK_HPP

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rfiscope/autoencoder.hpp"

namespace rfiscope::oracle {

struct GradientCheck {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
    std::size_t failures = 0;
};

// Relative error |a - n| / max(|a|, |n|). Below `abs_floor` both values are
// treated as zero and compared absolutely.
inline double relative_error(double analytic, double numeric, double abs_floor)
{
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    const double diff = std::abs(analytic - numeric);
    return scale < abs_floor ? diff / abs_floor : diff / scale;
}

// Compares every backprop gradient entry with a central difference of loss().
inline GradientCheck check_gradients(AutoencoderModel model, const std::vector<Eigen::MatrixXd>& batch,
                                     double step, double tolerance, double abs_floor)
{
    const Parameters analytic = backprop(model, batch);
    const auto grads = analytic.tensors();
    auto params = model.params.tensors();

    GradientCheck result;
    for (std::size_t t = 0; t < params.size(); ++t)
        for (std::size_t i = 0; i < params[t].size(); ++i) {
            double& x = params[t][i];
            const double saved = x;
            x = saved + step;
            const double up = loss(model, batch).value;
            x = saved - step;
            const double down = loss(model, batch).value;
            x = saved;
            const double numeric = (up - down) / (2.0 * step);
            const double err = relative_error(grads[t][i], numeric, abs_floor);
            result.max_relative_error = std::max(result.max_relative_error, err);
            result.checked += 1;
            if (err > tolerance)
                result.failures += 1;
        }
    return result;
}

inline std::vector<Eigen::MatrixXd> random_batch(std::size_t count, std::size_t dim, std::size_t steps,
                                                 std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::MatrixXd> batch;
    for (std::size_t b = 0; b < count; ++b) {
        Eigen::MatrixXd x(dim, steps);
        for (Eigen::Index i = 0; i < x.size(); ++i)
            x(i) = unit(rng);
        batch.push_back(x);
    }
    return batch;
}

} // namespace rfiscope::oracle

#endif
