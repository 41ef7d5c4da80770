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

#ifndef RFISCOPE_DATASET_HPP
#define RFISCOPE_DATASET_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rfiscope/array_model.hpp"
#include "rfiscope/correlation.hpp"
#include "rfiscope/imaging.hpp"
#include "rfiscope/signal_sim.hpp"

namespace rfiscope {

enum class Label : std::uint8_t { Clean = 0, Anomalous = 1, Unlabeled = 255 };
enum class AnomalyKind : std::uint8_t { None = 0, Transient = 1, Static = 2, Moving = 3 };
enum class Normalization { PerSequenceMax, Log };

std::string to_string(Label label);
std::string to_string(AnomalyKind kind);
std::string to_string(Normalization mode);
AnomalyKind anomaly_kind_from_string(const std::string& s);
Normalization normalization_from_string(const std::string& s);

struct ScenarioMeta {
    double snr_db = 0.0;
    double inr_db = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::uint32_t n_jammers = 0;
};

/// P consecutive normalised dirty images plus the look-angle annotation.
struct ImageSequence {
    ImageSize size;
    std::vector<Eigen::MatrixXf> frames; // u-major, values in [0, 1]
    Bin look_bin;
    Label label = Label::Clean;
    AnomalyKind kind = AnomalyKind::None;
    ScenarioMeta meta;

    std::size_t frame_count() const noexcept { return frames.size(); }
};

/// Everything needed to turn a source list into images.
struct SimulationSettings {
    ArrayGeometry geometry;
    ImageSize image;
    std::size_t frames = 10;
    std::size_t snapshots = 1000;
    double noise_power = 1.0;
    Normalization normalization = Normalization::PerSequenceMax;
    LagNormalization lag_mode = LagNormalization::Sum;
    std::size_t workers = 1;

    void validate() const;
};

/// SOI placement grid: n_u x n_v bins evenly spread over `span` times the
/// visible half-width on each axis. The default span keeps the whole grid
/// inside the visible disc.
struct GridSpec {
    std::size_t n_u = 8;
    std::size_t n_v = 8;
    double span = 0.7071067811865476;
};

/// Grid bins; positions outside the visible region are dropped with a warning.
std::vector<Bin> soi_grid(const GridSpec& grid, const ArrayGeometry& geom, const ImageSize& size);

/// Raw (unnormalised) dirty images, one per frame. Frame f uses the seed
/// derive_seed(seed, "frame", f).
std::vector<DirtyImage> render_frames(const SimulationSettings& settings,
                                      std::span<const SourceSpec> sources, std::uint64_t seed);

/// Maps a sequence of raw frames into [0, 1].
///   PerSequenceMax: divide by the largest pixel of the whole sequence.
///   Log: per frame, 10 log10(p / frame max), floored at -40 dB, rescaled to [0, 1].
/// An all-zero sequence stays all-zero.
std::vector<Eigen::MatrixXd> normalize_frames(std::span<const Eigen::MatrixXd> frames,
                                              Normalization mode);
Eigen::MatrixXd normalize_image(const Eigen::MatrixXd& pixels, Normalization mode);

ImageSequence make_sequence(const SimulationSettings& settings, std::span<const SourceSpec> sources,
                            Bin look_bin, Label label, AnomalyKind kind, const ScenarioMeta& meta);

/// Builds an anomalous sequence from explicit jammer sources after checking
/// that every jammer position is at least `min_offset_bins` away from the
/// look bin on some axis. Throws ConfigError otherwise.
ImageSequence make_anomalous_sequence(const SimulationSettings& settings, const SourceSpec& soi,
                                      Bin look_bin, std::span<const SourceSpec> jammers,
                                      AnomalyKind kind, const ScenarioMeta& meta,
                                      int min_offset_bins = 2);

SourceSpec soi_source(const SimulationSettings& settings, Bin bin, double snr_db);

/// One clean sequence per (position, SNR, replicate); SOI static, look bin
/// on the SOI. `domain` separates seed streams of different splits.
std::vector<ImageSequence> generate_clean_split(const SimulationSettings& settings,
                                                std::span<const Bin> positions,
                                                std::span<const double> snr_sweep,
                                                std::size_t replicates, std::uint64_t seed,
                                                const std::string& domain);

struct JammerPlan {
    std::vector<AnomalyKind> kinds{AnomalyKind::Transient, AnomalyKind::Static, AnomalyKind::Moving};
    std::vector<double> inr_db{0.0, 10.0, 20.0, 30.0};
    std::vector<std::size_t> counts{1, 2, 3};
    int min_offset_bins = 2;

    std::size_t cells() const noexcept { return kinds.size() * inr_db.size() * counts.size(); }
};

/// Randomly placed jammers of the given kind; deterministic in `seed`.
std::vector<SourceSpec> sample_jammers(const SimulationSettings& settings, Bin look_bin,
                                       AnomalyKind kind, double inr_db, std::size_t count,
                                       int min_offset_bins, std::uint64_t seed);

/// One anomalous sequence per (position, SNR, INR, kind, jammer count).
std::vector<ImageSequence> generate_anomalous_split(const SimulationSettings& settings,
                                                    std::span<const Bin> positions,
                                                    std::span<const double> snr_sweep,
                                                    const JammerPlan& plan, std::uint64_t seed,
                                                    const std::string& domain);

/// Feature matrix (u_fft v_fft + 2) x P: the flattened u-major frame followed
/// by u_look/u_fft + 0.5 and v_look/v_fft + 0.5.
Eigen::MatrixXd embed_look_angle(const ImageSequence& seq);

std::size_t feature_dim(const ImageSize& size) noexcept;

void write_dataset(const std::filesystem::path& path, std::span<const ImageSequence> seqs);
std::vector<ImageSequence> read_dataset(const std::filesystem::path& path);

} // namespace rfiscope

#endif
