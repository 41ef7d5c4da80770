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

#include "rfiscope/array_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rfiscope/errors.hpp"

namespace rfiscope {

namespace {

constexpr double kAngleSlack = 1e-12;

void check_index(const ArrayGeometry& geom, std::size_t n, std::size_t m)
{
    if (n >= geom.n_y || m >= geom.n_z) {
        std::ostringstream msg;
        msg << "element index (" << n << ", " << m << ") outside " << geom.n_y << "x" << geom.n_z
            << " array";
        throw std::out_of_range(msg.str());
    }
}

} // namespace

void ArrayGeometry::validate() const
{
    if (n_y == 0 || n_z == 0)
        throw std::invalid_argument("array needs at least one element along y and z");
    if (!(d_y > 0.0) || !(d_z > 0.0) || !(wavelength > 0.0) || !std::isfinite(d_y) ||
        !std::isfinite(d_z) || !std::isfinite(wavelength))
        throw std::invalid_argument("element spacing and wavelength must be positive and finite");
    if (!alias_free()) {
        std::ostringstream msg;
        msg << "element spacing (" << d_y << ", " << d_z << ") exceeds half a wavelength ("
            << wavelength / 2.0 << "); images will contain grating lobes";
        log_warning(msg.str());
    }
}

bool ArrayGeometry::alias_free() const noexcept
{
    return d_y <= wavelength / 2.0 && d_z <= wavelength / 2.0;
}

Direction Direction::from_degrees(double azimuth_deg, double elevation_deg) noexcept
{
    return {deg_to_rad(azimuth_deg), deg_to_rad(elevation_deg)};
}

double Direction::azimuth_deg() const noexcept { return rad_to_deg(azimuth); }
double Direction::elevation_deg() const noexcept { return rad_to_deg(elevation); }

void Direction::validate() const
{
    constexpr double half_pi = std::numbers::pi / 2.0;
    if (!std::isfinite(azimuth) || !std::isfinite(elevation))
        throw std::invalid_argument("direction angles must be finite");
    if (std::abs(azimuth) > half_pi + kAngleSlack || std::abs(elevation) > half_pi + kAngleSlack)
        throw std::invalid_argument("direction angles must lie in [-pi/2, pi/2]");
}

double equivalent_distance(const ArrayGeometry& geom, std::size_t n, std::size_t m,
                           const Direction& dir)
{
    check_index(geom, n, m);
    return static_cast<double>(n) * geom.d_y * std::cos(dir.elevation) * std::sin(dir.azimuth) +
           static_cast<double>(m) * geom.d_z * std::sin(dir.elevation);
}

std::complex<double> steering_element(const ArrayGeometry& geom, std::size_t n, std::size_t m,
                                      const Direction& dir)
{
    const double k = 2.0 * std::numbers::pi / geom.wavelength;
    return std::polar(1.0, k * equivalent_distance(geom, n, m, dir));
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const Direction& dir)
{
    Eigen::VectorXcd a(static_cast<Eigen::Index>(geom.element_count()));
    for (std::size_t n = 0; n < geom.n_y; ++n)
        for (std::size_t m = 0; m < geom.n_z; ++m)
            a(static_cast<Eigen::Index>(geom.element_index(n, m))) = steering_element(geom, n, m, dir);
    return a;
}

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

} // namespace rfiscope
