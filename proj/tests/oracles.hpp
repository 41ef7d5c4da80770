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

#ifndef RFISCOPE_TESTS_ORACLES_HPP
#define RFISCOPE_TESTS_ORACLES_HPP

// Independent reference computations. Nothing here calls into the code
// under test except for plain data types.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "rfiscope/array_model.hpp"
#include "rfiscope/correlation.hpp"

namespace rfiscope::oracle {

using cd = std::complex<double>;

inline cd steering(const ArrayGeometry& g, std::size_t n, std::size_t m, double az, double el)
{
    const double path = static_cast<double>(n) * g.d_y * std::cos(el) * std::sin(az) +
                        static_cast<double>(m) * g.d_z * std::sin(el);
    const double phase = 2.0 * std::numbers::pi / g.wavelength * path;
    return {std::cos(phase), std::sin(phase)};
}

inline Eigen::MatrixXcd random_hermitian(std::size_t dim, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i) = cd(gauss(rng), gauss(rng));
    return (a + a.adjoint()) * 0.5;
}

// Visits every ordered element pair and files it under its index difference.
inline Eigen::MatrixXcd lags_by_pairs(const Eigen::MatrixXcd& corr, std::size_t n_y, std::size_t n_z)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_z, n_y);
    for (std::size_t e1 = 0; e1 < n_y * n_z; ++e1)
        for (std::size_t e2 = 0; e2 < n_y * n_z; ++e2) {
            const long dn = static_cast<long>(e1 / n_z) - static_cast<long>(e2 / n_z);
            const long dm = static_cast<long>(e1 % n_z) - static_cast<long>(e2 % n_z);
            if (dn >= 0 && dm >= 0)
                out(dm, dn) += corr(e1, e2);
        }
    return out;
}

// Direct double sum over lags at centered bin (u, v).
inline cd dtft(const Eigen::MatrixXcd& lags, std::size_t n_y, std::size_t n_z, int u, int v,
               std::size_t u_fft, std::size_t v_fft)
{
    cd acc = 0.0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < n_y; ++k)
        for (std::size_t l = 0; l < n_z; ++l) {
            const double phase = -two_pi * (static_cast<double>(k) * u / static_cast<double>(u_fft) +
                                            static_cast<double>(l) * v / static_cast<double>(v_fft));
            acc += lags(l, k) * cd(std::cos(phase), std::sin(phase));
        }
    return acc / static_cast<double>(n_y * n_z);
}

// Central difference of f around x[i], restoring x[i] afterwards.
inline double central_difference(const std::function<double()>& f, double& x, double h)
{
    const double saved = x;
    x = saved + h;
    const double up = f();
    x = saved - h;
    const double down = f();
    x = saved;
    return (up - down) / (2.0 * h);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace rfiscope::oracle

#endif
