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

#ifndef RFISCOPE_ARRAY_MODEL_HPP
#define RFISCOPE_ARRAY_MODEL_HPP

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace rfiscope {

/// Uniform rectangular array in the y-z plane. Element (n, m) sits at
/// y = n * d_y, z = m * d_z with 0 <= n < n_y and 0 <= m < n_z.
struct ArrayGeometry {
    std::size_t n_y = 8;
    std::size_t n_z = 8;
    double d_y = 0.5;        // meters
    double d_z = 0.5;        // meters
    double wavelength = 1.0; // meters

    std::size_t element_count() const noexcept { return n_y * n_z; }

    /// Flat index used everywhere: row-major over (n, m), m fastest.
    std::size_t element_index(std::size_t n, std::size_t m) const noexcept { return n * n_z + m; }

    /// Throws std::invalid_argument on non-positive counts or lengths.
    /// Spacing above half a wavelength only produces a warning.
    void validate() const;

    bool alias_free() const noexcept;
};

/// Plane-wave arrival direction, radians. Azimuth is measured in the
/// x-y plane from broadside, elevation out of the x-y plane.
struct Direction {
    double azimuth = 0.0;
    double elevation = 0.0;

    static Direction from_degrees(double azimuth_deg, double elevation_deg) noexcept;
    double azimuth_deg() const noexcept;
    double elevation_deg() const noexcept;

    /// Throws std::invalid_argument when not finite or outside [-pi/2, pi/2].
    void validate() const;
};

double equivalent_distance(const ArrayGeometry& geom, std::size_t n, std::size_t m,
                           const Direction& dir);

std::complex<double> steering_element(const ArrayGeometry& geom, std::size_t n, std::size_t m,
                                      const Direction& dir);

/// Array manifold a(theta, phi), length n_y * n_z, ordered by element_index().
Eigen::VectorXcd steering_vector(const ArrayGeometry& geom, const Direction& dir);

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

} // namespace rfiscope

#endif
