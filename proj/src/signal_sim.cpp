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

#include "rfiscope/signal_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rfiscope/errors.hpp"
#include "rfiscope/seeding.hpp"

namespace rfiscope {

namespace {

// Fills `out` with circular complex Gaussian samples of the given variance.
void fill_complex_gaussian(std::mt19937_64& rng, double variance, Eigen::Ref<Eigen::VectorXcd> out)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        out(i) = {re, im};
    }
}

} // namespace

bool SourceSpec::active_in(std::size_t frame) const
{
    if (!lifetime)
        return true;
    return std::find(lifetime->begin(), lifetime->end(), frame) != lifetime->end();
}

Direction SourceSpec::direction_at(std::size_t frame) const
{
    if (trajectory.size() == 1)
        return trajectory.front();
    if (frame >= trajectory.size()) {
        std::ostringstream msg;
        msg << "source has no trajectory point for frame " << frame << " (trajectory length "
            << trajectory.size() << ")";
        throw ConfigError(msg.str());
    }
    return trajectory[frame];
}

void SourceSpec::validate(std::size_t frames) const
{
    if (!(power >= 0.0) || !std::isfinite(power))
        throw ConfigError("source power must be finite and non-negative");
    if (trajectory.empty())
        throw ConfigError("source trajectory is empty");
    for (const auto& d : trajectory) {
        try {
            d.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (lifetime) {
        for (std::size_t f : *lifetime)
            if (f >= frames)
                throw ConfigError("source lifetime frame " + std::to_string(f) +
                                  " outside sequence of " + std::to_string(frames) + " frames");
    }
    for (std::size_t f = 0; f < frames; ++f)
        if (active_in(f))
            (void)direction_at(f);
}

SnapshotBlock generate_snapshots(const ArrayGeometry& geom, std::span<const SourceSpec> sources,
                                 std::size_t frame, std::size_t s_count, double noise_power,
                                 std::uint64_t seed)
{
    if (s_count == 0)
        throw std::invalid_argument("snapshot count must be at least 1");
    if (!(noise_power > 0.0))
        throw std::invalid_argument("noise power must be positive");

    const auto rows = static_cast<Eigen::Index>(s_count);
    const auto cols = static_cast<Eigen::Index>(geom.element_count());

    SnapshotBlock block;
    block.geometry = geom;
    block.seed = seed;
    block.data.resize(rows, cols);

    {
        std::mt19937_64 rng(derive_seed(seed, "noise"));
        std::normal_distribution<double> normal(0.0, std::sqrt(noise_power / 2.0));
        // Row-major draw order: one snapshot at a time.
        for (Eigen::Index l = 0; l < rows; ++l)
            for (Eigen::Index e = 0; e < cols; ++e) {
                const double re = normal(rng);
                const double im = normal(rng);
                block.data(l, e) = {re, im};
            }
    }

    Eigen::VectorXcd waveform(rows);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const SourceSpec& src = sources[i];
        if (!src.active_in(frame) || src.power == 0.0)
            continue;
        const Eigen::VectorXcd a = steering_vector(geom, src.direction_at(frame));
        std::mt19937_64 rng(derive_seed(seed, "source", i));
        fill_complex_gaussian(rng, src.power, waveform);
        block.data.noalias() += waveform * a.transpose();
    }
    return block;
}

double snr_to_power(double snr_db, double noise_power) noexcept
{
    return noise_power * std::pow(10.0, snr_db / 10.0);
}

std::vector<Direction> linear_trajectory(const Direction& from, const Direction& to,
                                         std::size_t frames)
{
    std::vector<Direction> out;
    out.reserve(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const double t = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0.0;
        out.push_back({from.azimuth + t * (to.azimuth - from.azimuth),
                       from.elevation + t * (to.elevation - from.elevation)});
    }
    return out;
}

} // namespace rfiscope
