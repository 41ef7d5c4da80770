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

#include "rfiscope/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rfiscope/binary_io.hpp"
#include "rfiscope/errors.hpp"
#include "rfiscope/parallel.hpp"
#include "rfiscope/seeding.hpp"

namespace rfiscope {

namespace {

constexpr std::array<char, 8> kDatasetMagic{'R', 'F', 'I', 'D', 'S', 'E', 'T', '\0'};
constexpr std::uint32_t kDatasetVersion = 1;
constexpr double kLogFloorDb = -40.0;

bool far_enough(Bin a, Bin b, int min_offset)
{
    return std::abs(a.u - b.u) >= min_offset || std::abs(a.v - b.v) >= min_offset;
}

std::vector<Bin> visible_bins(const ArrayGeometry& geom, const ImageSize& size)
{
    std::vector<Bin> bins;
    const int hu = static_cast<int>(size.u_fft / 2);
    const int hv = static_cast<int>(size.v_fft / 2);
    for (int u = -hu; u < hu; ++u)
        for (int v = -hv; v < hv; ++v) {
            const auto el = bin_to_elevation(v, size.v_fft, geom);
            if (el && bin_to_azimuth(u, size.u_fft, *el, geom))
                bins.push_back({u, v});
        }
    return bins;
}

} // namespace

std::string to_string(Label label)
{
    switch (label) {
    case Label::Clean: return "clean";
    case Label::Anomalous: return "anomalous";
    case Label::Unlabeled: return "unlabeled";
    }
    return "unlabeled";
}

std::string to_string(AnomalyKind kind)
{
    switch (kind) {
    case AnomalyKind::None: return "none";
    case AnomalyKind::Transient: return "transient";
    case AnomalyKind::Static: return "static";
    case AnomalyKind::Moving: return "moving";
    }
    return "none";
}

std::string to_string(Normalization mode)
{
    return mode == Normalization::Log ? "log" : "per-sequence-max";
}

AnomalyKind anomaly_kind_from_string(const std::string& s)
{
    if (s == "transient") return AnomalyKind::Transient;
    if (s == "static") return AnomalyKind::Static;
    if (s == "moving") return AnomalyKind::Moving;
    if (s == "none") return AnomalyKind::None;
    throw ConfigError("unknown jammer kind '" + s + "'");
}

Normalization normalization_from_string(const std::string& s)
{
    if (s == "per-sequence-max") return Normalization::PerSequenceMax;
    if (s == "log") return Normalization::Log;
    throw ConfigError("unknown normalization mode '" + s + "'");
}

void SimulationSettings::validate() const
{
    try {
        geometry.validate();
        image.validate(geometry);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (frames == 0)
        throw ConfigError("sequence length P must be at least 1");
    if (snapshots == 0)
        throw ConfigError("snapshot count S must be at least 1");
    if (!(noise_power > 0.0))
        throw ConfigError("noise power must be positive");
}

std::vector<Bin> soi_grid(const GridSpec& grid, const ArrayGeometry& geom, const ImageSize& size)
{
    if (grid.n_u == 0 || grid.n_v == 0)
        throw ConfigError("SOI grid needs at least one position per axis");

    auto positions = [](std::size_t count, double half_width, int limit) {
        std::vector<int> out;
        for (std::size_t i = 0; i < count; ++i) {
            const double t = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.5;
            const int p = static_cast<int>(std::lround(-half_width + 2.0 * half_width * t));
            out.push_back(std::clamp(p, -limit, limit - 1));
        }
        return out;
    };

    // Visible half-width in bins: |u| <= u_fft d_y / lambda.
    const int hu = static_cast<int>(size.u_fft / 2);
    const int hv = static_cast<int>(size.v_fft / 2);
    const double wu = std::floor(std::min<double>(hu - 1, grid.span * size.u_fft * geom.d_y / geom.wavelength));
    const double wv = std::floor(std::min<double>(hv - 1, grid.span * size.v_fft * geom.d_z / geom.wavelength));

    std::vector<Bin> bins;
    for (int u : positions(grid.n_u, wu, hu))
        for (int v : positions(grid.n_v, wv, hv)) {
            const auto el = bin_to_elevation(v, size.v_fft, geom);
            if (!el || !bin_to_azimuth(u, size.u_fft, *el, geom)) {
                log_warning("SOI grid position (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") lies outside the visible region; skipped");
                continue;
            }
            bins.push_back({u, v});
        }
    return bins;
}

std::vector<DirtyImage> render_frames(const SimulationSettings& settings,
                                      std::span<const SourceSpec> sources, std::uint64_t seed)
{
    std::vector<DirtyImage> images;
    images.reserve(settings.frames);
    for (std::size_t f = 0; f < settings.frames; ++f) {
        const SnapshotBlock block = generate_snapshots(settings.geometry, sources, f, settings.snapshots,
                                                       settings.noise_power, derive_seed(seed, "frame", f));
        const SampleCorrelation corr = estimate_correlation(block);
        const LagCorrelation lags = collapse_to_lags(corr, settings.geometry, settings.lag_mode);
        images.push_back(dirty_image(lags, settings.geometry, settings.image));
    }
    return images;
}

std::vector<Eigen::MatrixXd> normalize_frames(std::span<const Eigen::MatrixXd> frames,
                                              Normalization mode)
{
    double sequence_peak = 0.0;
    for (const auto& f : frames) {
        if (!f.allFinite())
            throw std::invalid_argument("cannot normalise an image with non-finite pixels");
        if (f.size() > 0)
            sequence_peak = std::max(sequence_peak, f.maxCoeff());
    }

    std::vector<Eigen::MatrixXd> out;
    out.reserve(frames.size());
    for (const auto& f : frames) {
        // Log mode references each frame to its own peak.
        const double peak = mode == Normalization::Log && f.size() > 0 ? f.maxCoeff() : sequence_peak;
        if (!(peak > 0.0)) {
            out.push_back(Eigen::MatrixXd::Zero(f.rows(), f.cols()));
            continue;
        }
        if (mode == Normalization::PerSequenceMax) {
            out.push_back(f / peak);
        } else {
            Eigen::MatrixXd g = f.unaryExpr([peak](double p) {
                const double db = p > 0.0 ? 10.0 * std::log10(p / peak) : kLogFloorDb;
                return (std::max(db, kLogFloorDb) - kLogFloorDb) / -kLogFloorDb;
            });
            out.push_back(std::move(g));
        }
    }
    return out;
}

Eigen::MatrixXd normalize_image(const Eigen::MatrixXd& pixels, Normalization mode)
{
    return normalize_frames(std::span<const Eigen::MatrixXd>(&pixels, 1), mode).front();
}

ImageSequence make_sequence(const SimulationSettings& settings, std::span<const SourceSpec> sources,
                            Bin look_bin, Label label, AnomalyKind kind, const ScenarioMeta& meta)
{
    for (const auto& s : sources)
        s.validate(settings.frames);

    const auto images = render_frames(settings, sources, meta.seed);
    std::vector<Eigen::MatrixXd> raw;
    raw.reserve(images.size());
    for (const auto& img : images)
        raw.push_back(img.pixels);

    ImageSequence seq;
    seq.size = settings.image;
    seq.look_bin = look_bin;
    seq.label = label;
    seq.kind = kind;
    seq.meta = meta;
    for (auto& f : normalize_frames(raw, settings.normalization))
        seq.frames.push_back(f.cast<float>());
    return seq;
}

SourceSpec soi_source(const SimulationSettings& settings, Bin bin, double snr_db)
{
    SourceSpec soi;
    soi.kind = SourceKind::Soi;
    soi.trajectory = {bin_to_direction(bin, settings.geometry, settings.image)};
    soi.power = snr_to_power(snr_db, settings.noise_power);
    return soi;
}

ImageSequence make_anomalous_sequence(const SimulationSettings& settings, const SourceSpec& soi,
                                      Bin look_bin, std::span<const SourceSpec> jammers,
                                      AnomalyKind kind, const ScenarioMeta& meta, int min_offset_bins)
{
    if (jammers.empty())
        throw ConfigError("anomalous sequence needs at least one jammer");
    for (const auto& j : jammers) {
        j.validate(settings.frames);
        for (std::size_t f = 0; f < settings.frames; ++f) {
            if (!j.active_in(f))
                continue;
            Bin b;
            try {
                b = angles_to_bin(j.direction_at(f), settings.geometry, settings.image);
            } catch (const std::out_of_range& e) {
                throw ConfigError(std::string("jammer outside the image: ") + e.what());
            }
            if (!far_enough(b, look_bin, min_offset_bins)) {
                std::ostringstream msg;
                msg << "jammer at bin (" << b.u << ", " << b.v << ") in frame " << f
                    << " coincides with the look angle (" << look_bin.u << ", " << look_bin.v << ")";
                throw ConfigError(msg.str());
            }
        }
    }

    std::vector<SourceSpec> sources;
    sources.reserve(1 + jammers.size());
    sources.push_back(soi);
    sources.insert(sources.end(), jammers.begin(), jammers.end());
    ScenarioMeta m = meta;
    m.n_jammers = static_cast<std::uint32_t>(jammers.size());
    return make_sequence(settings, sources, look_bin, Label::Anomalous, kind, m);
}

std::vector<ImageSequence> generate_clean_split(const SimulationSettings& settings,
                                                std::span<const Bin> positions,
                                                std::span<const double> snr_sweep,
                                                std::size_t replicates, std::uint64_t seed,
                                                const std::string& domain)
{
    settings.validate();
    if (replicates == 0)
        throw ConfigError("replicate count must be at least 1");
    if (snr_sweep.empty())
        throw ConfigError("SNR sweep is empty");
    if (positions.empty())
        throw ConfigError("no SOI positions");

    const std::uint64_t split_seed = derive_seed(seed, domain);
    const std::size_t n = positions.size() * snr_sweep.size() * replicates;
    std::vector<ImageSequence> out(n);
    parallel_for(n, settings.workers, [&](std::size_t i) {
        const std::size_t s = (i / replicates) % snr_sweep.size();
        const std::size_t p = i / (replicates * snr_sweep.size());
        const Bin look = positions[p];
        const SourceSpec soi = soi_source(settings, look, snr_sweep[s]);
        ScenarioMeta meta;
        meta.snr_db = snr_sweep[s];
        meta.seed = derive_seed(split_seed, i);
        out[i] = make_sequence(settings, std::span<const SourceSpec>(&soi, 1), look, Label::Clean,
                               AnomalyKind::None, meta);
    });
    return out;
}

std::vector<SourceSpec> sample_jammers(const SimulationSettings& settings, Bin look_bin,
                                       AnomalyKind kind, double inr_db, std::size_t count,
                                       int min_offset_bins, std::uint64_t seed)
{
    std::vector<Bin> candidates;
    for (Bin b : visible_bins(settings.geometry, settings.image))
        if (far_enough(b, look_bin, min_offset_bins))
            candidates.push_back(b);
    if (candidates.empty())
        throw ConfigError("no visible bin satisfies the jammer offset constraint");

    std::mt19937_64 rng(derive_seed(seed, "jammers"));
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_frame(0, settings.frames - 1);
    const double power = snr_to_power(inr_db, settings.noise_power);
    const auto& geom = settings.geometry;
    const auto& size = settings.image;

    std::vector<SourceSpec> jammers;
    for (std::size_t j = 0; j < count; ++j) {
        SourceSpec src;
        src.kind = SourceKind::Rfi;
        src.power = power;
        const Direction start = bin_to_direction(candidates[pick(rng)], geom, size);
        switch (kind) {
        case AnomalyKind::Transient:
            src.trajectory = {start};
            src.lifetime = std::vector<std::size_t>{pick_frame(rng)};
            break;
        case AnomalyKind::Static:
            src.trajectory = {start};
            break;
        case AnomalyKind::Moving: {
            bool placed = false;
            for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
                const Direction from = attempt == 0 ? start : bin_to_direction(candidates[pick(rng)], geom, size);
                const Direction to = bin_to_direction(candidates[pick(rng)], geom, size);
                auto path = linear_trajectory(from, to, settings.frames);
                const Bin b0 = angles_to_bin(path.front(), geom, size);
                const Bin b1 = angles_to_bin(path.back(), geom, size);
                if (std::max(std::abs(b0.u - b1.u), std::abs(b0.v - b1.v)) < 2)
                    continue;
                placed = std::all_of(path.begin(), path.end(), [&](const Direction& d) {
                    return far_enough(angles_to_bin(d, geom, size), look_bin, min_offset_bins);
                });
                if (placed)
                    src.trajectory = std::move(path);
            }
            if (!placed)
                throw ConfigError("could not place a moving jammer away from the look angle");
            break;
        }
        case AnomalyKind::None:
            throw ConfigError("jammer kind 'none' is not an anomaly");
        }
        jammers.push_back(std::move(src));
    }
    return jammers;
}

std::vector<ImageSequence> generate_anomalous_split(const SimulationSettings& settings,
                                                    std::span<const Bin> positions,
                                                    std::span<const double> snr_sweep,
                                                    const JammerPlan& plan, std::uint64_t seed,
                                                    const std::string& domain)
{
    settings.validate();
    if (snr_sweep.empty() || plan.inr_db.empty() || plan.kinds.empty() || plan.counts.empty())
        throw ConfigError("anomalous split needs non-empty SNR, INR, kind and count lists");

    const std::uint64_t split_seed = derive_seed(seed, domain);
    const std::size_t per_position = snr_sweep.size() * plan.cells();
    const std::size_t n = positions.size() * per_position;
    std::vector<ImageSequence> out(n);
    parallel_for(n, settings.workers, [&](std::size_t i) {
        std::size_t r = i;
        const std::size_t c = r % plan.counts.size();
        r /= plan.counts.size();
        const std::size_t k = r % plan.kinds.size();
        r /= plan.kinds.size();
        const std::size_t q = r % plan.inr_db.size();
        r /= plan.inr_db.size();
        const std::size_t s = r % snr_sweep.size();
        const std::size_t p = r / snr_sweep.size();

        const Bin look = positions[p];
        const std::uint64_t cell_seed = derive_seed(split_seed, i);
        const SourceSpec soi = soi_source(settings, look, snr_sweep[s]);
        const auto jammers = sample_jammers(settings, look, plan.kinds[k], plan.inr_db[q],
                                            plan.counts[c], plan.min_offset_bins, cell_seed);
        ScenarioMeta meta;
        meta.snr_db = snr_sweep[s];
        meta.inr_db = plan.inr_db[q];
        meta.seed = cell_seed;
        out[i] = make_anomalous_sequence(settings, soi, look, jammers, plan.kinds[k], meta,
                                         plan.min_offset_bins);
    });
    return out;
}

std::size_t feature_dim(const ImageSize& size) noexcept { return size.pixel_count() + 2; }

Eigen::MatrixXd embed_look_angle(const ImageSequence& seq)
{
    const auto U = static_cast<Eigen::Index>(seq.size.u_fft);
    const auto V = static_cast<Eigen::Index>(seq.size.v_fft);
    const auto D = static_cast<Eigen::Index>(feature_dim(seq.size));
    const auto P = static_cast<Eigen::Index>(seq.frames.size());

    Eigen::MatrixXd features(D, P);
    const double lu = static_cast<double>(seq.look_bin.u) / static_cast<double>(U) + 0.5;
    const double lv = static_cast<double>(seq.look_bin.v) / static_cast<double>(V) + 0.5;
    for (Eigen::Index t = 0; t < P; ++t) {
        const auto& f = seq.frames[static_cast<std::size_t>(t)];
        if (f.rows() != U || f.cols() != V)
            throw std::invalid_argument("frame shape does not match sequence image size");
        for (Eigen::Index r = 0; r < U; ++r)
            for (Eigen::Index c = 0; c < V; ++c)
                features(r * V + c, t) = static_cast<double>(f(r, c));
        features(U * V, t) = lu;
        features(U * V + 1, t) = lv;
    }
    return features;
}

void write_dataset(const std::filesystem::path& path, std::span<const ImageSequence> seqs)
{
    std::uint32_t U = 0, V = 0, P = 0;
    if (!seqs.empty()) {
        U = static_cast<std::uint32_t>(seqs.front().size.u_fft);
        V = static_cast<std::uint32_t>(seqs.front().size.v_fft);
        P = static_cast<std::uint32_t>(seqs.front().frames.size());
    }
    for (const auto& s : seqs)
        if (s.size.u_fft != U || s.size.v_fft != V || s.frames.size() != P)
            throw std::invalid_argument("all sequences in a dataset file must share image size and P");

    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kDatasetMagic.data(), kDatasetMagic.size());
    write_le<std::uint32_t>(os, kDatasetVersion);
    write_le<std::uint32_t>(os, U);
    write_le<std::uint32_t>(os, V);
    write_le<std::uint32_t>(os, P);
    write_le<std::uint64_t>(os, seqs.size());

    for (const auto& s : seqs)
        for (const auto& f : s.frames)
            for (Eigen::Index r = 0; r < f.rows(); ++r)
                for (Eigen::Index c = 0; c < f.cols(); ++c)
                    write_le<float>(os, f(r, c));

    for (const auto& s : seqs) {
        write_le<std::int32_t>(os, s.look_bin.u);
        write_le<std::int32_t>(os, s.look_bin.v);
        write_le<std::uint8_t>(os, static_cast<std::uint8_t>(s.label));
        write_le<std::uint8_t>(os, static_cast<std::uint8_t>(s.kind));
        write_le<std::uint16_t>(os, static_cast<std::uint16_t>(s.meta.n_jammers));
        write_le<double>(os, s.meta.snr_db);
        write_le<double>(os, s.meta.inr_db);
        write_le<std::uint64_t>(os, s.meta.seed);
    }
    if (!os)
        throw std::runtime_error("write failed for " + path.string());
}

std::vector<ImageSequence> read_dataset(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open dataset " + path.string());

    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kDatasetMagic)
        throw FormatError(path.string() + " is not a dataset file");
    const auto version = read_le<std::uint32_t>(is);
    if (version != kDatasetVersion)
        throw FormatError("unsupported dataset version " + std::to_string(version));
    const auto U = read_le<std::uint32_t>(is);
    const auto V = read_le<std::uint32_t>(is);
    const auto P = read_le<std::uint32_t>(is);
    const auto count = read_le<std::uint64_t>(is);

    std::vector<ImageSequence> seqs(count);
    for (auto& s : seqs) {
        s.size = {U, V};
        s.frames.resize(P);
        for (auto& f : s.frames) {
            f.resize(U, V);
            for (Eigen::Index r = 0; r < f.rows(); ++r)
                for (Eigen::Index c = 0; c < f.cols(); ++c)
                    f(r, c) = read_le<float>(is);
        }
    }
    for (auto& s : seqs) {
        s.look_bin.u = read_le<std::int32_t>(is);
        s.look_bin.v = read_le<std::int32_t>(is);
        s.label = static_cast<Label>(read_le<std::uint8_t>(is));
        s.kind = static_cast<AnomalyKind>(read_le<std::uint8_t>(is));
        s.meta.n_jammers = read_le<std::uint16_t>(is);
        s.meta.snr_db = read_le<double>(is);
        s.meta.inr_db = read_le<double>(is);
        s.meta.seed = read_le<std::uint64_t>(is);
    }
    return seqs;
}

} // namespace rfiscope
