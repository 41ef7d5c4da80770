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

#ifndef RFISCOPE_PIPELINE_HPP
#define RFISCOPE_PIPELINE_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfiscope/config.hpp"
#include "rfiscope/detector.hpp"

namespace rfiscope {

/// A pipeline stage failed; carries the stage name.
class StageFailure : public std::runtime_error {
public:
    StageFailure(std::string stage, const std::string& what)
        : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage))
    {
    }
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Generated splits, in memory.
struct DatasetSplits {
    std::vector<ImageSequence> train;
    std::vector<ImageSequence> val;
    std::vector<ImageSequence> holdout;
    std::vector<ImageSequence> test;
};

/// Builds all four splits. Each split has its own seed domain under `seed`.
DatasetSplits generate_splits(const DatasetConfig& config, std::uint64_t seed, std::size_t workers);

/// Writes train/val/holdout/test .rfd files plus manifest.json into `dir`.
void write_splits(const std::filesystem::path& dir, const DatasetSplits& splits, const DatasetConfig& config,
                  std::uint64_t seed);
std::vector<ImageSequence> read_split(const std::filesystem::path& dir, const std::string& name);

std::vector<Eigen::MatrixXd> features_of(std::span<const ImageSequence> seqs);

/// Model shape for a dataset: input width and P come from the images.
ModelConfig resolve_model(ModelConfig model, const DatasetConfig& dataset);

struct PipelineSummary {
    double accuracy = 0.0;
    double holdout_false_positive_rate = 0.0;
    std::size_t holdout_size = 0;
    std::size_t best_epoch = 0;
    std::vector<std::string> skipped_stages;
    EvaluationReport report;
};

/// dataset -> train -> calibrate -> evaluate under `out`. With `resume`, a
/// stage whose recorded hash and outputs are present is not re-run.
/// Layout:
///   run.json, stages.json
///   dataset/{train,val,holdout,test}.rfd, dataset/manifest.json
///   model/model.ckpt, model/loss_curve.csv
///   threshold.json
///   eval/accuracy_vs_inr.csv, eval/recon_error_hist.csv,
///   eval/holdout_errors.csv, eval/summary.json
PipelineSummary run_pipeline(const PipelineConfig& config, const std::filesystem::path& out, bool resume);

/// run.json contents: resolved config, versions and the invoking command.
Json run_echo(const std::string& command, const Json& resolved);

} // namespace rfiscope

#endif
