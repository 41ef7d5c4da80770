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

#ifndef RFISCOPE_IMAGING_HPP
#define RFISCOPE_IMAGING_HPP

#include <cstddef>
#include <filesystem>
#include <optional>

#include <Eigen/Dense>

#include "rfiscope/array_model.hpp"
#include "rfiscope/correlation.hpp"

namespace rfiscope {

struct ImageSize {
    std::size_t u_fft = 32; // azimuth axis, paired with the y-lag k
    std::size_t v_fft = 32; // elevation axis, paired with the z-lag l

    void validate(const ArrayGeometry& geom) const;
    std::size_t pixel_count() const noexcept { return u_fft * v_fft; }
};

/// Centered DFT bin: u in [-u_fft/2, u_fft/2 - 1], v likewise.
struct Bin {
    int u = 0;
    int v = 0;
    friend bool operator==(const Bin&, const Bin&) = default;
};

/// Power estimate over the centered (u, v) DFT grid.
///
/// Storage is u-major: pixels(u + u_fft/2, v + v_fft/2). Bins outside the
/// visible region carry zero power, NaN angles and a false mask entry.
struct DirtyImage {
    ImageSize size;
    Eigen::MatrixXd pixels;
    Eigen::MatrixXd azimuth;   // per (u, v), radians
    Eigen::VectorXd elevation; // per v, radians
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> valid;

    double at(Bin b) const { return pixels(row_of(b.u), col_of(b.v)); }
    Eigen::Index row_of(int u) const noexcept { return u + static_cast<int>(size.u_fft / 2); }
    Eigen::Index col_of(int v) const noexcept { return v + static_cast<int>(size.v_fft / 2); }
    Bin bin_of(Eigen::Index row, Eigen::Index col) const noexcept
    {
        return {static_cast<int>(row) - static_cast<int>(size.u_fft / 2),
                static_cast<int>(col) - static_cast<int>(size.v_fft / 2)};
    }
    Bin argmax() const;
};

/// Complex 2-D DFT of the scaled lags on the centered grid, before the
/// magnitude and visibility mask: entry (u + u_fft/2, v + v_fft/2) is
///   sum_{k,l} r(l,k)/(N M) exp(-j2pi k u/u_fft) exp(-j2pi l v/v_fft).
Eigen::MatrixXcd lag_spectrum(const LagCorrelation& lags, const ArrayGeometry& geom,
                              const ImageSize& size);

/// I[u,v] = | sum_{k,l} r(l,k)/(N M) exp(-j2pi k u/u_fft) exp(-j2pi l v/v_fft) |
/// evaluated with a zero-padded 2-D FFT.
DirtyImage dirty_image(const LagCorrelation& lags, const ArrayGeometry& geom, const ImageSize& size);

/// Elevation of bin v, or nullopt when the bin lies outside the visible region.
std::optional<double> bin_to_elevation(int v, std::size_t v_fft, const ArrayGeometry& geom);

/// Azimuth of bin u at the given elevation, or nullopt outside the visible region.
std::optional<double> bin_to_azimuth(int u, std::size_t u_fft, double elevation,
                                     const ArrayGeometry& geom);

/// Nearest bin to a direction; throws std::out_of_range if it falls off the grid.
Bin angles_to_bin(const Direction& dir, const ArrayGeometry& geom, const ImageSize& size);

/// Direction at the center of a visible bin; throws std::out_of_range otherwise.
Direction bin_to_direction(Bin bin, const ArrayGeometry& geom, const ImageSize& size);

/// 8-bit binary PGM, max-normalised. Columns run over u, rows over v with
/// the highest elevation on top.
void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& pixels);

/// Long-format CSV: u,v,azimuth_deg,elevation_deg,power.
void write_image_csv(const std::filesystem::path& path, const DirtyImage& img);
void write_image_csv(const std::filesystem::path& path, const DirtyImage& img,
                     const Eigen::MatrixXd& pixels);

} // namespace rfiscope

#endif
