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

#ifndef RFISCOPE_SIGNAL_SIM_HPP
#define RFISCOPE_SIGNAL_SIM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rfiscope/array_model.hpp"

namespace rfiscope {

enum class SourceKind { Soi, Rfi };

/// One narrowband emitter. The waveform is i.i.d. circular complex
/// Gaussian with variance `power` (relative to the noise variance).
struct SourceSpec {
    SourceKind kind = SourceKind::Soi;
    /// One direction per frame, or a single entry for a fixed emitter.
    std::vector<Direction> trajectory;
    double power = 1.0;
    /// Frames during which the source radiates; nullopt means every frame.
    std::optional<std::vector<std::size_t>> lifetime;

    bool active_in(std::size_t frame) const;

    /// Throws ConfigError if the trajectory has no entry for `frame`.
    Direction direction_at(std::size_t frame) const;

    /// Checks power, trajectory and that lifetime lies within [0, frames).
    void validate(std::size_t frames) const;
};

struct SnapshotBlock {
    /// S x (n_y * n_z); row l is the array vector y[l] transposed.
    Eigen::MatrixXcd data;
    ArrayGeometry geometry;
    std::uint64_t seed = 0;

    std::size_t snapshot_count() const noexcept { return static_cast<std::size_t>(data.rows()); }
};

/// Draws S snapshots of  y[l] = sum_i a(dir_i) x_i[l] + w[l]  for one frame.
///
/// Noise and each source have independent random streams derived from
/// `seed` and the source's position in `sources`, so removing trailing
/// sources leaves the remaining contributions bit-identical.
SnapshotBlock generate_snapshots(const ArrayGeometry& geom, std::span<const SourceSpec> sources,
                                 std::size_t frame, std::size_t s_count, double noise_power,
                                 std::uint64_t seed);

/// Per-element power ratio in dB to a variance.
double snr_to_power(double snr_db, double noise_power) noexcept;

/// `frames` directions linearly interpolated in (azimuth, elevation).
std::vector<Direction> linear_trajectory(const Direction& from, const Direction& to,
                                         std::size_t frames);

} // namespace rfiscope

#endif
