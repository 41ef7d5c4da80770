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

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rfiscope/array_model.hpp"

using namespace rfiscope;
using std::numbers::pi;

namespace {

ArrayGeometry half_wave(std::size_t ny, std::size_t nz)
{
    ArrayGeometry g;
    g.n_y = ny;
    g.n_z = nz;
    g.d_y = 0.5;
    g.d_z = 0.5;
    g.wavelength = 1.0;
    return g;
}

} // namespace

TEST(ArrayModel, EquivalentDistanceOriginAndBroadside)
{
    const ArrayGeometry g = half_wave(4, 3);
    EXPECT_EQ(equivalent_distance(g, 0, 0, {0.7, -0.3}), 0.0);
    for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t m = 0; m < 3; ++m)
            EXPECT_EQ(equivalent_distance(g, n, m, {0.0, 0.0}), 0.0);
}

TEST(ArrayModel, EquivalentDistanceEndfire)
{
    const ArrayGeometry g = half_wave(2, 2);
    EXPECT_NEAR(equivalent_distance(g, 1, 1, {pi / 2, 0.0}), 0.5, 1e-15);
}

TEST(ArrayModel, EquivalentDistanceRejectsBadIndex)
{
    const ArrayGeometry g = half_wave(2, 3);
    EXPECT_THROW(equivalent_distance(g, 2, 0, {}), std::out_of_range);
    EXPECT_THROW(equivalent_distance(g, 0, 3, {}), std::out_of_range);
    EXPECT_THROW(steering_element(g, 5, 0, {}), std::out_of_range);
}

TEST(ArrayModel, SteeringElementExamples)
{
    const ArrayGeometry g = half_wave(3, 3);
    EXPECT_EQ(steering_element(g, 0, 0, {1.0, 0.4}), std::complex<double>(1.0, 0.0));
    EXPECT_EQ(steering_element(g, 2, 1, {0.0, 0.0}), std::complex<double>(1.0, 0.0));
    const auto half_turn = steering_element(g, 1, 0, {pi / 2, 0.0});
    EXPECT_NEAR(half_turn.real(), -1.0, 1e-15);
    EXPECT_NEAR(half_turn.imag(), 0.0, 1e-15);
}

TEST(ArrayModel, SteeringVectorExamples)
{
    const Eigen::VectorXcd ones = steering_vector(half_wave(4, 5), {0.0, 0.0});
    ASSERT_EQ(ones.size(), 20);
    EXPECT_TRUE(ones.isApprox(Eigen::VectorXcd::Ones(20)));

    const Eigen::VectorXcd single = steering_vector(half_wave(1, 1), {0.3, 0.2});
    ASSERT_EQ(single.size(), 1);
    EXPECT_EQ(single(0), std::complex<double>(1.0, 0.0));

    const Eigen::VectorXcd pair = steering_vector(half_wave(2, 1), {pi / 6, 0.0});
    ASSERT_EQ(pair.size(), 2);
    EXPECT_NEAR(std::abs(pair(0) - std::complex<double>(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(pair(1) - std::complex<double>(0, 1)), 0.0, 1e-15);
}

TEST(ArrayModel, SteeringVectorOrderingMatchesOracle)
{
    ArrayGeometry g = half_wave(3, 4);
    g.d_y = 0.37;
    g.d_z = 0.41;
    g.wavelength = 0.9;
    const Direction dir{0.61, -0.27};
    const Eigen::VectorXcd a = steering_vector(g, dir);
    for (std::size_t n = 0; n < g.n_y; ++n)
        for (std::size_t m = 0; m < g.n_z; ++m) {
            const auto idx = static_cast<Eigen::Index>(n * g.n_z + m);
            EXPECT_NEAR(std::abs(a(idx) - oracle::steering(g, n, m, dir.azimuth, dir.elevation)), 0.0,
                        1e-13);
            EXPECT_EQ(a(idx), steering_element(g, n, m, dir));
        }
}

TEST(ArrayModel, UnitModulusConjugateSymmetryAndSeparability)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-pi / 2, pi / 2);
    const ArrayGeometry g = half_wave(5, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const Direction dir{angle(rng), angle(rng)};
        const Eigen::VectorXcd a = steering_vector(g, dir);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            EXPECT_LT(std::abs(std::abs(a(i)) - 1.0), 1e-12);

        const Eigen::VectorXcd mirrored = steering_vector(g, {-dir.azimuth, -dir.elevation});
        EXPECT_LT((mirrored - a.conjugate()).cwiseAbs().maxCoeff(), 1e-12);

        // Kronecker product of the y-line and z-line manifolds, m fastest.
        ArrayGeometry line_y = g, line_z = g;
        line_y.n_z = 1;
        line_z.n_y = 1;
        const Eigen::VectorXcd ay = steering_vector(line_y, dir);
        const Eigen::VectorXcd az = steering_vector(line_z, dir);
        for (Eigen::Index n = 0; n < ay.size(); ++n)
            for (Eigen::Index m = 0; m < az.size(); ++m)
                EXPECT_LT(std::abs(a(n * az.size() + m) - ay(n) * az(m)), 1e-12);
    }
}

TEST(ArrayModel, GeometryValidation)
{
    ArrayGeometry g = half_wave(2, 2);
    EXPECT_NO_THROW(g.validate());
    EXPECT_TRUE(g.alias_free());

    g.d_y = 0.8;
    EXPECT_NO_THROW(g.validate());
    EXPECT_FALSE(g.alias_free());

    g = half_wave(0, 2);
    EXPECT_THROW(g.validate(), std::invalid_argument);
    g = half_wave(2, 2);
    g.wavelength = 0.0;
    EXPECT_THROW(g.validate(), std::invalid_argument);
    g = half_wave(2, 2);
    g.d_z = -0.1;
    EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(ArrayModel, DirectionValidationAndDegrees)
{
    EXPECT_NO_THROW(Direction({pi / 2, -pi / 2}).validate());
    EXPECT_THROW(Direction({2.0, 0.0}).validate(), std::invalid_argument);
    EXPECT_THROW(Direction({0.0, std::nan("")}).validate(), std::invalid_argument);

    const Direction d = Direction::from_degrees(30.0, -45.0);
    EXPECT_NEAR(d.azimuth, pi / 6, 1e-15);
    EXPECT_NEAR(d.elevation, -pi / 4, 1e-15);
    EXPECT_NEAR(d.azimuth_deg(), 30.0, 1e-12);
    EXPECT_NEAR(d.elevation_deg(), -45.0, 1e-12);
}
