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

#include "rfiscope/scenario.hpp"

#include <cstdio>

#include "rfiscope/correlation.hpp"
#include "rfiscope/errors.hpp"
#include "rfiscope/seeding.hpp"

namespace rfiscope {

namespace fs = std::filesystem;

namespace {

Bin bin_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ConfigError(where + " must be [u, v] integers");
    return {j[0].get<int>(), j[1].get<int>()};
}

Direction direction_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + " must be [azimuth_deg, elevation_deg]");
    const Direction d = Direction::from_degrees(j[0].get<double>(), j[1].get<double>());
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return d;
}

std::string frame_name(const char* prefix, std::size_t f, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%02zu.%s", prefix, f, ext);
    return buf;
}

} // namespace

Scenario scenario_from_json(const Json& j)
{
    if (!j.is_object())
        throw ConfigError("scenario must be a JSON object");
    for (const auto& item : j.items()) {
        static const char* const known[] = {"geometry", "image",         "frames",  "snapshots", "noise_power",
                                            "seed",     "normalization", "look_bin", "sources"};
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known))
            throw ConfigError("unknown key '" + item.key() + "' in scenario");
    }

    Scenario s;
    s.sim.frames = 1;
    try {
        if (j.contains("geometry"))
            s.sim.geometry = geometry_from_json(j.at("geometry"));
        if (j.contains("image")) {
            s.sim.image.u_fft = j.at("image").at("u_fft").get<std::size_t>();
            s.sim.image.v_fft = j.at("image").at("v_fft").get<std::size_t>();
        }
        s.sim.frames = j.value("frames", s.sim.frames);
        s.sim.snapshots = j.value("snapshots", s.sim.snapshots);
        s.sim.noise_power = j.value("noise_power", s.sim.noise_power);
        s.seed = j.value("seed", s.seed);
        if (j.contains("normalization"))
            s.sim.normalization = normalization_from_string(j.at("normalization").get<std::string>());
        if (j.contains("look_bin"))
            s.look_bin = bin_from_json(j.at("look_bin"), "look_bin");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    try {
        s.sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto& geom = s.sim.geometry;
    const auto& size = s.sim.image;
    const Json sources = j.value("sources", Json::array());
    if (!sources.is_array())
        throw ConfigError("scenario sources must be an array");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const Json& src = sources[i];
        const std::string where = "sources[" + std::to_string(i) + "]";
        SourceSpec spec;
        try {
            const std::string kind = src.value("kind", std::string("soi"));
            if (kind != "soi" && kind != "rfi")
                throw ConfigError(where + ".kind must be 'soi' or 'rfi'");
            spec.kind = kind == "soi" ? SourceKind::Soi : SourceKind::Rfi;
            spec.power = snr_to_power(src.value("power_db", 0.0), s.sim.noise_power);
            if (src.contains("bin")) {
                spec.trajectory = {bin_to_direction(bin_from_json(src.at("bin"), where + ".bin"), geom, size)};
            } else if (src.contains("direction_deg")) {
                spec.trajectory = {direction_from_json(src.at("direction_deg"), where + ".direction_deg")};
            } else if (src.contains("from_bin") && src.contains("to_bin")) {
                spec.trajectory = linear_trajectory(
                    bin_to_direction(bin_from_json(src.at("from_bin"), where + ".from_bin"), geom, size),
                    bin_to_direction(bin_from_json(src.at("to_bin"), where + ".to_bin"), geom, size), s.sim.frames);
            } else if (src.contains("trajectory_deg")) {
                for (const Json& d : src.at("trajectory_deg"))
                    spec.trajectory.push_back(direction_from_json(d, where + ".trajectory_deg"));
            } else {
                throw ConfigError(where + " needs bin, direction_deg, from_bin/to_bin or trajectory_deg");
            }
            if (src.contains("lifetime"))
                spec.lifetime = src.at("lifetime").get<std::vector<std::size_t>>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + ": " + e.what());
        }
        spec.validate(s.sim.frames);
        s.sources.push_back(std::move(spec));
    }

    if (!s.look_bin)
        for (const auto& src : s.sources)
            if (src.kind == SourceKind::Soi) {
                s.look_bin = angles_to_bin(src.trajectory.front(), geom, size);
                break;
            }
    return s;
}

Json scenario_to_json(const Scenario& s)
{
    Json sources = Json::array();
    for (const auto& src : s.sources) {
        Json traj = Json::array();
        for (const auto& d : src.trajectory)
            traj.push_back({d.azimuth_deg(), d.elevation_deg()});
        Json entry{{"kind", src.kind == SourceKind::Soi ? "soi" : "rfi"},
                   {"power_db", 10.0 * std::log10(src.power / s.sim.noise_power)},
                   {"trajectory_deg", traj}};
        if (src.lifetime)
            entry["lifetime"] = *src.lifetime;
        sources.push_back(entry);
    }
    Json j{{"geometry", to_json(s.sim.geometry)},
           {"image", {{"u_fft", s.sim.image.u_fft}, {"v_fft", s.sim.image.v_fft}}},
           {"frames", s.sim.frames},
           {"snapshots", s.sim.snapshots},
           {"noise_power", s.sim.noise_power},
           {"seed", s.seed},
           {"normalization", to_string(s.sim.normalization)},
           {"sources", sources}};
    if (s.look_bin)
        j["look_bin"] = {s.look_bin->u, s.look_bin->v};
    return j;
}

Scenario load_scenario(const fs::path& path) { return scenario_from_json(read_json_file(path)); }

Json scenario_truth(const Scenario& s)
{
    Json frames = Json::array();
    for (std::size_t f = 0; f < s.sim.frames; ++f) {
        Json active = Json::array();
        for (std::size_t i = 0; i < s.sources.size(); ++i) {
            const auto& src = s.sources[i];
            if (!src.active_in(f))
                continue;
            const Bin b = angles_to_bin(src.direction_at(f), s.sim.geometry, s.sim.image);
            active.push_back({{"index", i}, {"kind", src.kind == SourceKind::Soi ? "soi" : "rfi"}, {"bin", {b.u, b.v}}});
        }
        frames.push_back({{"frame", f}, {"sources", active}});
    }
    Json truth{{"frames", frames}};
    truth["look_bin"] = s.look_bin ? Json{s.look_bin->u, s.look_bin->v} : Json();
    return truth;
}

std::vector<DirtyImage> scenario_images(const Scenario& s) { return render_frames(s.sim, s.sources, s.seed); }

void write_scenario_images(const fs::path& dir, const Scenario& s)
{
    fs::create_directories(dir);
    const auto images = scenario_images(s);
    std::vector<Eigen::MatrixXd> raw;
    for (const auto& img : images)
        raw.push_back(img.pixels);
    const auto normalised = normalize_frames(raw, s.sim.normalization);
    for (std::size_t f = 0; f < images.size(); ++f) {
        write_pgm(dir / frame_name("frame", f, "pgm"), normalised[f]);
        write_image_csv(dir / frame_name("frame", f, "csv"), images[f]);
    }
    write_json_file(dir / "truth.json", scenario_truth(s));
}

void write_scenario_correlations(const fs::path& dir, const Scenario& s)
{
    fs::create_directories(dir);
    const std::string hash = json_digest(scenario_to_json(s));
    for (std::size_t f = 0; f < s.sim.frames; ++f) {
        const std::uint64_t seed = derive_seed(s.seed, "frame", f);
        const SnapshotBlock block =
            generate_snapshots(s.sim.geometry, s.sources, f, s.sim.snapshots, s.sim.noise_power, seed);
        const SampleCorrelation corr = estimate_correlation(block);
        const LagCorrelation lags = collapse_to_lags(corr, s.sim.geometry, s.sim.lag_mode);
        dump_complex64(dir / frame_name("correlation", f, "bin"), corr.matrix, seed, hash,
                       "sample correlation, element order n * n_z + m");
        dump_complex64(dir / frame_name("lags", f, "bin"), lags.lags, seed, hash,
                       "redundant-pair lag sums, rows z-lag, columns y-lag");
    }
    write_json_file(dir / "truth.json", scenario_truth(s));
}

} // namespace rfiscope
