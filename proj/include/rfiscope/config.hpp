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

#ifndef RFISCOPE_CONFIG_HPP
#define RFISCOPE_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfiscope/autoencoder.hpp"
#include "rfiscope/dataset.hpp"
#include "rfiscope/training.hpp"

namespace rfiscope {

using Json = nlohmann::ordered_json;

/// Splits and sweeps of one generated dataset.
struct DatasetConfig {
    SimulationSettings sim;
    GridSpec grid;
    std::vector<double> train_snr_db;
    std::vector<double> val_snr_db;
    std::vector<double> holdout_snr_db;
    std::size_t train_replicates = 1;
    std::size_t val_replicates = 1;
    std::size_t holdout_replicates = 1;
    /// Test split: SOI at a fixed SNR on the first `test_positions` grid bins.
    double test_snr_db = 0.0;
    std::size_t test_positions = 16;
    std::size_t test_clean_replicates = 4;
    JammerPlan plan;

    DatasetConfig();
};

/// Everything `pipeline` needs. Worker count is excluded from stage hashes
/// because it never changes results.
struct PipelineConfig {
    std::uint64_t seed = 1;
    DatasetConfig dataset;
    ModelConfig model;
    TrainConfig training;
    double percentile = 95.0;
    std::size_t workers = 1;
};

Json to_json(const ArrayGeometry& g);
Json to_json(const DatasetConfig& c);
Json to_json(const ModelConfig& c);
Json to_json(const TrainConfig& c);
Json to_json(const PipelineConfig& c);

/// Reads a config object; absent keys keep the defaults, unknown keys are a
/// ConfigError so that typos do not pass silently.
ArrayGeometry geometry_from_json(const Json& j, ArrayGeometry base = {});
DatasetConfig dataset_config_from_json(const Json& j, DatasetConfig base = {});
ModelConfig model_config_from_json(const Json& j, ModelConfig base = {});
TrainConfig train_config_from_json(const Json& j, TrainConfig base = {});
PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig base = {});

/// Parses a JSON file; unreadable or malformed files raise ConfigError.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

/// Inclusive arithmetic sweep "lo:hi:step" or comma list "a,b,c".
std::vector<double> parse_sweep(const std::string& text);

/// Build identity written into every run.json.
Json version_info();

/// Stable 64-bit digest of a JSON value, printed as 16 hex digits.
std::string json_digest(const Json& j);

} // namespace rfiscope

#endif
