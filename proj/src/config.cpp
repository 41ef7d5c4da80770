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

#include "rfiscope/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "rfiscope/errors.hpp"
#include "rfiscope/seeding.hpp"

#ifndef RFISCOPE_VERSION
#define RFISCOPE_VERSION "0.0.0"
#endif

namespace rfiscope {

namespace {

void require_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            known = known || item.key() == k;
        if (!known)
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

std::vector<std::string> kind_names(const std::vector<AnomalyKind>& kinds)
{
    std::vector<std::string> out;
    for (AnomalyKind k : kinds)
        out.push_back(to_string(k));
    return out;
}

} // namespace

DatasetConfig::DatasetConfig()
    : train_snr_db(parse_sweep("-9:20:3")), val_snr_db(train_snr_db), holdout_snr_db(train_snr_db)
{
}

Json to_json(const ArrayGeometry& g)
{
    return Json{{"n_y", g.n_y}, {"n_z", g.n_z}, {"d_y", g.d_y}, {"d_z", g.d_z}, {"wavelength", g.wavelength}};
}

Json to_json(const DatasetConfig& c)
{
    return Json{
        {"geometry", to_json(c.sim.geometry)},
        {"image", {{"u_fft", c.sim.image.u_fft}, {"v_fft", c.sim.image.v_fft}}},
        {"frames", c.sim.frames},
        {"snapshots", c.sim.snapshots},
        {"noise_power", c.sim.noise_power},
        {"normalization", to_string(c.sim.normalization)},
        {"lag_average", c.sim.lag_mode == LagNormalization::Average},
        {"grid", {{"n_u", c.grid.n_u}, {"n_v", c.grid.n_v}, {"span", c.grid.span}}},
        {"train_snr_db", c.train_snr_db},
        {"val_snr_db", c.val_snr_db},
        {"holdout_snr_db", c.holdout_snr_db},
        {"train_replicates", c.train_replicates},
        {"val_replicates", c.val_replicates},
        {"holdout_replicates", c.holdout_replicates},
        {"test_snr_db", c.test_snr_db},
        {"test_positions", c.test_positions},
        {"test_clean_replicates", c.test_clean_replicates},
        {"kinds", kind_names(c.plan.kinds)},
        {"inr_db", c.plan.inr_db},
        {"jammer_counts", c.plan.counts},
        {"min_offset_bins", c.plan.min_offset_bins},
    };
}

Json to_json(const ModelConfig& c)
{
    return Json{{"encoder_hidden", c.encoder_hidden},
                {"decoder_hidden", c.decoder_hidden},
                {"alpha", c.alpha},
                {"l1_last_only", c.l1_last_only}};
}

Json to_json(const TrainConfig& c)
{
    return Json{{"learning_rate", c.adam.learning_rate},
                {"beta1", c.adam.beta1},
                {"beta2", c.adam.beta2},
                {"epsilon", c.adam.epsilon},
                {"batch_size", c.batch_size},
                {"max_epochs", c.max_epochs},
                {"patience", c.patience}};
}

Json to_json(const PipelineConfig& c)
{
    return Json{{"seed", c.seed},
                {"dataset", to_json(c.dataset)},
                {"model", to_json(c.model)},
                {"training", to_json(c.training)},
                {"percentile", c.percentile},
                {"workers", c.workers}};
}

ArrayGeometry geometry_from_json(const Json& j, ArrayGeometry g)
{
    const std::string where = "geometry";
    require_keys(j, where, {"n_y", "n_z", "d_y", "d_z", "wavelength"});
    read(j, "n_y", g.n_y, where);
    read(j, "n_z", g.n_z, where);
    read(j, "d_y", g.d_y, where);
    read(j, "d_z", g.d_z, where);
    read(j, "wavelength", g.wavelength, where);
    return g;
}

DatasetConfig dataset_config_from_json(const Json& j, DatasetConfig c)
{
    const std::string where = "dataset";
    require_keys(j, where,
                 {"geometry", "image", "frames", "snapshots", "noise_power", "normalization", "lag_average",
                  "grid", "train_snr_db", "val_snr_db", "holdout_snr_db", "train_replicates",
                  "val_replicates", "holdout_replicates", "test_snr_db", "test_positions",
                  "test_clean_replicates", "kinds", "inr_db", "jammer_counts", "min_offset_bins"});
    if (j.contains("geometry"))
        c.sim.geometry = geometry_from_json(j.at("geometry"), c.sim.geometry);
    if (j.contains("image")) {
        const Json& img = j.at("image");
        require_keys(img, "dataset.image", {"u_fft", "v_fft"});
        read(img, "u_fft", c.sim.image.u_fft, "dataset.image");
        read(img, "v_fft", c.sim.image.v_fft, "dataset.image");
    }
    read(j, "frames", c.sim.frames, where);
    read(j, "snapshots", c.sim.snapshots, where);
    read(j, "noise_power", c.sim.noise_power, where);
    if (j.contains("normalization")) {
        std::string mode;
        read(j, "normalization", mode, where);
        c.sim.normalization = normalization_from_string(mode);
    }
    if (j.contains("lag_average")) {
        bool avg = false;
        read(j, "lag_average", avg, where);
        c.sim.lag_mode = avg ? LagNormalization::Average : LagNormalization::Sum;
    }
    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        require_keys(g, "dataset.grid", {"n_u", "n_v", "span"});
        read(g, "n_u", c.grid.n_u, "dataset.grid");
        read(g, "n_v", c.grid.n_v, "dataset.grid");
        read(g, "span", c.grid.span, "dataset.grid");
    }
    read(j, "train_snr_db", c.train_snr_db, where);
    read(j, "val_snr_db", c.val_snr_db, where);
    read(j, "holdout_snr_db", c.holdout_snr_db, where);
    read(j, "train_replicates", c.train_replicates, where);
    read(j, "val_replicates", c.val_replicates, where);
    read(j, "holdout_replicates", c.holdout_replicates, where);
    read(j, "test_snr_db", c.test_snr_db, where);
    read(j, "test_positions", c.test_positions, where);
    read(j, "test_clean_replicates", c.test_clean_replicates, where);
    if (j.contains("kinds")) {
        std::vector<std::string> names;
        read(j, "kinds", names, where);
        c.plan.kinds.clear();
        for (const auto& n : names)
            c.plan.kinds.push_back(anomaly_kind_from_string(n));
    }
    read(j, "inr_db", c.plan.inr_db, where);
    read(j, "jammer_counts", c.plan.counts, where);
    read(j, "min_offset_bins", c.plan.min_offset_bins, where);
    return c;
}

ModelConfig model_config_from_json(const Json& j, ModelConfig c)
{
    const std::string where = "model";
    require_keys(j, where, {"encoder_hidden", "decoder_hidden", "alpha", "l1_last_only"});
    read(j, "encoder_hidden", c.encoder_hidden, where);
    read(j, "decoder_hidden", c.decoder_hidden, where);
    read(j, "alpha", c.alpha, where);
    read(j, "l1_last_only", c.l1_last_only, where);
    return c;
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c)
{
    const std::string where = "training";
    require_keys(j, where,
                 {"learning_rate", "beta1", "beta2", "epsilon", "batch_size", "max_epochs", "patience"});
    read(j, "learning_rate", c.adam.learning_rate, where);
    read(j, "beta1", c.adam.beta1, where);
    read(j, "beta2", c.adam.beta2, where);
    read(j, "epsilon", c.adam.epsilon, where);
    read(j, "batch_size", c.batch_size, where);
    read(j, "max_epochs", c.max_epochs, where);
    read(j, "patience", c.patience, where);
    return c;
}

PipelineConfig pipeline_config_from_json(const Json& j, PipelineConfig c)
{
    const std::string where = "pipeline";
    require_keys(j, where, {"seed", "dataset", "model", "training", "percentile", "workers"});
    read(j, "seed", c.seed, where);
    if (j.contains("dataset"))
        c.dataset = dataset_config_from_json(j.at("dataset"), c.dataset);
    if (j.contains("model"))
        c.model = model_config_from_json(j.at("model"), c.model);
    if (j.contains("training"))
        c.training = train_config_from_json(j.at("training"), c.training);
    read(j, "percentile", c.percentile, where);
    read(j, "workers", c.workers, where);
    return c;
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read " + path.string());
    try {
        return Json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

std::vector<double> parse_sweep(const std::string& text)
{
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v))
            throw ConfigError("bad number '" + s + "' in sweep '" + text + "'");
        return v;
    };

    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');)
            parts.push_back(p);
        if (parts.size() != 3)
            throw ConfigError("sweep '" + text + "' must be lo:hi:step");
        const double lo = number(parts[0]), hi = number(parts[1]), step = number(parts[2]);
        if (step <= 0.0 || hi < lo)
            throw ConfigError("sweep '" + text + "' needs step > 0 and hi >= lo");
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(lo + static_cast<double>(i) * step);
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');)
            out.push_back(number(p));
    }
    if (out.empty())
        throw ConfigError("empty sweep");
    return out;
}

Json version_info()
{
    return Json{{"rfiscope", RFISCOPE_VERSION},
                {"compiler", __VERSION__},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)}};
}

std::string json_digest(const Json& j)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix64(fnv1a64(j.dump()))));
    return buf;
}

} // namespace rfiscope
