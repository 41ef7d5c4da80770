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

#ifndef RFISCOPE_SCENARIO_HPP
#define RFISCOPE_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "rfiscope/config.hpp"
#include "rfiscope/dataset.hpp"

namespace rfiscope {

/// A hand-written emitter layout for previews.
///
/// JSON schema:
///   { "geometry": {...}, "image": {"u_fft", "v_fft"}, "frames", "snapshots",
///     "noise_power", "seed", "normalization", "look_bin": [u, v],
///     "sources": [ { "kind": "soi" | "rfi", "power_db",
///                    one of  "bin": [u, v]
///                            "direction_deg": [az, el]
///                            "from_bin": [u, v], "to_bin": [u, v]
///                            "trajectory_deg": [[az, el], ...],
///                    "lifetime": [frame, ...] } ] }
/// power_db is relative to the noise power. look_bin defaults to the first
/// SOI's starting bin.
struct Scenario {
    SimulationSettings sim;
    std::uint64_t seed = 1;
    std::vector<SourceSpec> sources;
    std::optional<Bin> look_bin;
};

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// True source bins per frame (inactive sources omitted) and the look bin.
Json scenario_truth(const Scenario& s);

/// Raw dirty images, one per frame, seeded exactly as the dataset generator.
std::vector<DirtyImage> scenario_images(const Scenario& s);

/// frame_XX.pgm (normalised), frame_XX.csv (raw) and truth.json into `dir`.
void write_scenario_images(const std::filesystem::path& dir, const Scenario& s);

/// Per frame: sample correlation and lag matrix as complex64 dumps.
void write_scenario_correlations(const std::filesystem::path& dir, const Scenario& s);

} // namespace rfiscope

#endif
