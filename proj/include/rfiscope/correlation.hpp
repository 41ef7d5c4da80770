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

#ifndef RFISCOPE_CORRELATION_HPP
#define RFISCOPE_CORRELATION_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "rfiscope/array_model.hpp"
#include "rfiscope/signal_sim.hpp"

namespace rfiscope {

struct SampleCorrelation {
    Eigen::MatrixXcd matrix; // (n_y n_z) x (n_y n_z), Hermitian
    std::size_t s_count = 0;
};

/// Correlations summed over redundant element pairs.
///
/// lags(l, k) collects every pair whose index differences are
/// n1 - n2 = k (y axis) and m1 - m2 = l (z axis); counts(l, k) is the
/// number of such pairs, (n_z - l) * (n_y - k).
struct LagCorrelation {
    Eigen::MatrixXcd lags; // n_z x n_y
    Eigen::MatrixXi counts;
};

enum class LagNormalization {
    Sum,     // plain sum over redundant pairs
    Average, // sum divided by the pair count
};

SampleCorrelation estimate_correlation(const SnapshotBlock& block);

LagCorrelation collapse_to_lags(const SampleCorrelation& corr, const ArrayGeometry& geom,
                                LagNormalization mode = LagNormalization::Sum);

/// Expected correlation  sum_i p_i a_i a_i^H + noise_power I  of
/// uncorrelated point sources, evaluated at `frame`.
Eigen::MatrixXcd theoretical_correlation(const ArrayGeometry& geom,
                                         std::span<const SourceSpec> sources, std::size_t frame,
                                         double noise_power);

/// Writes `m` row-major as little-endian interleaved complex64 to `bin_path`
/// and a JSON sidecar `<bin_path>.json` with dims, seed and scenario hash.
void dump_complex64(const std::filesystem::path& bin_path, const Eigen::MatrixXcd& m,
                    std::uint64_t seed, const std::string& scenario_hash,
                    const std::string& description);

Eigen::MatrixXcd load_complex64(const std::filesystem::path& bin_path);

} // namespace rfiscope

#endif
