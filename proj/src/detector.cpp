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

#include "rfiscope/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "rfiscope/errors.hpp"

namespace rfiscope {

namespace {

int kind_rank(AnomalyKind k)
{
    switch (k) {
    case AnomalyKind::Transient: return 0;
    case AnomalyKind::Static: return 1;
    case AnomalyKind::Moving: return 2;
    case AnomalyKind::None: return 3;
    }
    return 3;
}

struct Tally {
    std::size_t correct = 0;
    std::size_t n = 0;
    double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
};

} // namespace

double percentile_linear(std::vector<double> values, double p)
{
    if (values.empty())
        throw std::invalid_argument("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 100.0))
        throw std::invalid_argument("percentile must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

DetectorThreshold calibrate_from_errors(std::span<const double> errors, double percentile)
{
    if (errors.empty())
        throw std::invalid_argument("cannot calibrate on an empty split");
    if (!(percentile > 0.0 && percentile < 100.0))
        throw std::invalid_argument("calibration percentile must lie in (0, 100)");
    DetectorThreshold t;
    t.percentile = percentile;
    t.calibration_size = errors.size();
    t.threshold = std::max(0.0, percentile_linear({errors.begin(), errors.end()}, percentile));
    return t;
}

DetectorThreshold calibrate(const AutoencoderModel& model, std::span<const Eigen::MatrixXd> training,
                            double percentile, std::size_t workers)
{
    if (training.empty())
        throw std::invalid_argument("cannot calibrate on an empty split");
    const auto errors = reconstruction_errors(model, training, workers);
    return calibrate_from_errors(errors, percentile);
}

Classification classify(const AutoencoderModel& model, const DetectorThreshold& threshold,
                        const Eigen::MatrixXd& features)
{
    if (static_cast<std::size_t>(features.rows()) != model.config.input_dim)
        throw std::invalid_argument("feature dimension " + std::to_string(features.rows()) +
                                    " does not match model input " +
                                    std::to_string(model.config.input_dim));
    const double err = reconstruction_errors(model, std::span<const Eigen::MatrixXd>(&features, 1)).front();
    return {exceeds(err, threshold.threshold) ? Label::Anomalous : Label::Clean, err};
}

const CellAccuracy* EvaluationReport::find(double inr_db, const std::string& kind,
                                           std::size_t n_jammers) const
{
    for (const auto& row : table)
        if (row.kind == kind && row.n_jammers == n_jammers && row.inr_db == inr_db)
            return &row;
    return nullptr;
}

double EvaluationReport::kind_accuracy(double inr_db, const std::string& kind) const
{
    double correct = 0.0;
    std::size_t n = 0;
    for (const auto& row : table)
        if (row.kind == kind && row.inr_db == inr_db) {
            correct += row.accuracy * static_cast<double>(row.n);
            n += row.n;
        }
    return n ? correct / static_cast<double>(n) : 0.0;
}

EvaluationReport evaluate_errors(std::span<const ImageSequence> test, std::span<const double> errors,
                                 const DetectorThreshold& threshold)
{
    if (test.size() != errors.size())
        throw std::invalid_argument("one error per test sequence is required");

    EvaluationReport report;
    Tally overall, clean;
    std::map<std::tuple<double, int, std::size_t>, Tally> cells;
    std::map<double, Tally> per_inr;

    for (std::size_t i = 0; i < test.size(); ++i) {
        const ImageSequence& s = test[i];
        if (s.label == Label::Unlabeled) {
            ++report.skipped;
            continue;
        }
        const bool flagged = exceeds(errors[i], threshold.threshold);
        const bool right = flagged == (s.label == Label::Anomalous);
        report.errors.push_back({errors[i], s.label});
        overall.n += 1;
        overall.correct += right;
        if (s.label == Label::Clean) {
            clean.n += 1;
            clean.correct += right;
        } else {
            auto& cell = cells[{s.meta.inr_db, kind_rank(s.kind), s.meta.n_jammers}];
            cell.n += 1;
            cell.correct += right;
            auto& row = per_inr[s.meta.inr_db];
            row.n += 1;
            row.correct += right;
        }
    }
    if (report.skipped > 0)
        log_warning(std::to_string(report.skipped) + " unlabeled test sequences skipped");

    static const AnomalyKind by_rank[] = {AnomalyKind::Transient, AnomalyKind::Static,
                                          AnomalyKind::Moving, AnomalyKind::None};
    for (const auto& [key, tally] : cells) {
        const auto& [inr, rank, nj] = key;
        report.table.push_back({inr, to_string(by_rank[rank]), nj, tally.accuracy(), tally.n});
    }
    for (const auto& [inr, tally] : per_inr) {
        Tally pooled{tally.correct + clean.correct, tally.n + clean.n};
        report.table.push_back({inr, "all", 0, pooled.accuracy(), pooled.n});
    }
    if (clean.n > 0)
        report.table.push_back({std::numeric_limits<double>::quiet_NaN(), "clean", 0, clean.accuracy(), clean.n});

    report.total = overall.n;
    report.accuracy = overall.accuracy();
    return report;
}

EvaluationReport evaluate(const AutoencoderModel& model, const DetectorThreshold& threshold,
                          std::span<const ImageSequence> test, std::size_t workers)
{
    std::vector<Eigen::MatrixXd> features;
    features.reserve(test.size());
    for (const auto& s : test) {
        features.push_back(embed_look_angle(s));
        if (static_cast<std::size_t>(features.back().rows()) != model.config.input_dim)
            throw std::invalid_argument("test feature dimension does not match the model");
    }
    const auto errors = reconstruction_errors(model, features, workers);
    return evaluate_errors(test, errors, threshold);
}

void write_accuracy_csv(const std::filesystem::path& path, const EvaluationReport& report)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.precision(10);
    os << "inr_db,kind,n_jammers,accuracy,n\n";
    for (const auto& row : report.table) {
        if (std::isnan(row.inr_db))
            os << "nan";
        else
            os << row.inr_db;
        os << ',' << row.kind << ',' << row.n_jammers << ',' << row.accuracy << ',' << row.n << '\n';
    }
}

void write_error_csv(const std::filesystem::path& path, const EvaluationReport& report)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.precision(17);
    os << "error,label\n";
    for (const auto& e : report.errors)
        os << e.error << ',' << to_string(e.label) << '\n';
}

void save_threshold(const std::filesystem::path& path, const DetectorThreshold& t)
{
    nlohmann::json j = {{"threshold", t.threshold},
                        {"percentile", t.percentile},
                        {"calibration_size", t.calibration_size}};
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

DetectorThreshold load_threshold(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw FormatError("cannot open threshold file " + path.string());
    try {
        const auto j = nlohmann::json::parse(is);
        DetectorThreshold t;
        t.threshold = j.at("threshold").get<double>();
        t.percentile = j.at("percentile").get<double>();
        t.calibration_size = j.at("calibration_size").get<std::size_t>();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed threshold file " + path.string() + ": " + e.what());
    }
}

} // namespace rfiscope
