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

#ifndef RFISCOPE_DETECTOR_HPP
#define RFISCOPE_DETECTOR_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfiscope/autoencoder.hpp"
#include "rfiscope/dataset.hpp"

namespace rfiscope {

struct DetectorThreshold {
    double threshold = 0.0;
    double percentile = 95.0;
    std::size_t calibration_size = 0;
};

/// Linear-interpolation (type 7) sample quantile, p in [0, 100].
double percentile_linear(std::vector<double> values, double p);

DetectorThreshold calibrate_from_errors(std::span<const double> errors, double percentile = 95.0);

/// Threshold at the given percentile of per-sequence reconstruction errors
/// on the (clean) training split.
DetectorThreshold calibrate(const AutoencoderModel& model, std::span<const Eigen::MatrixXd> training,
                            double percentile = 95.0, std::size_t workers = 1);

/// Strictly greater than the threshold is anomalous.
constexpr bool exceeds(double error, double threshold) noexcept { return error > threshold; }

struct Classification {
    Label decision = Label::Clean;
    double error = 0.0;
};

Classification classify(const AutoencoderModel& model, const DetectorThreshold& threshold,
                        const Eigen::MatrixXd& features);

struct CellAccuracy {
    double inr_db = 0.0;
    std::string kind; // transient | static | moving | all | clean
    std::size_t n_jammers = 0;
    double accuracy = 0.0;
    std::size_t n = 0;
};

struct ErrorSample {
    double error = 0.0;
    Label label = Label::Clean;
};

struct EvaluationReport {
    double accuracy = 0.0;
    std::size_t total = 0;
    std::size_t skipped = 0;
    /// Per (INR, kind, jammer count) detection rate on anomalous sequences,
    /// plus per-INR rows of kind "all" that pool that INR's anomalous
    /// sequences with every clean sequence, and one "clean" row.
    std::vector<CellAccuracy> table;
    std::vector<ErrorSample> errors;

    const CellAccuracy* find(double inr_db, const std::string& kind, std::size_t n_jammers) const;
    /// Accuracy over all anomalous sequences of one kind at one INR.
    double kind_accuracy(double inr_db, const std::string& kind) const;
};

/// Scores precomputed errors. Unlabeled entries are skipped with a warning.
EvaluationReport evaluate_errors(std::span<const ImageSequence> test, std::span<const double> errors,
                                 const DetectorThreshold& threshold);

EvaluationReport evaluate(const AutoencoderModel& model, const DetectorThreshold& threshold,
                          std::span<const ImageSequence> test, std::size_t workers = 1);

/// accuracy_vs_inr.csv: inr_db,kind,n_jammers,accuracy,n
void write_accuracy_csv(const std::filesystem::path& path, const EvaluationReport& report);
/// recon_error_hist.csv: error,label
void write_error_csv(const std::filesystem::path& path, const EvaluationReport& report);

void save_threshold(const std::filesystem::path& path, const DetectorThreshold& t);
DetectorThreshold load_threshold(const std::filesystem::path& path);

} // namespace rfiscope

#endif
