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

#include "rfiscope/correlation.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rfiscope/binary_io.hpp"
#include "rfiscope/errors.hpp"

namespace rfiscope {

SampleCorrelation estimate_correlation(const SnapshotBlock& block)
{
    if (block.data.rows() == 0 || block.data.cols() == 0)
        throw std::invalid_argument("cannot estimate correlation from an empty snapshot block");

    const auto s = static_cast<double>(block.data.rows());
    // Rows of `data` are y^T, so sum_s y_s y_s^H = data^T conj(data).
    Eigen::MatrixXcd r = block.data.transpose() * block.data.conjugate();
    r /= s;

    SampleCorrelation out;
    out.matrix = 0.5 * (r + r.adjoint());
    out.s_count = block.snapshot_count();
    return out;
}

LagCorrelation collapse_to_lags(const SampleCorrelation& corr, const ArrayGeometry& geom,
                                LagNormalization mode)
{
    const auto dim = static_cast<Eigen::Index>(geom.element_count());
    if (corr.matrix.rows() != dim || corr.matrix.cols() != dim)
        throw std::invalid_argument("correlation matrix does not match array geometry");

    const auto ny = static_cast<Eigen::Index>(geom.n_y);
    const auto nz = static_cast<Eigen::Index>(geom.n_z);

    LagCorrelation out;
    out.lags = Eigen::MatrixXcd::Zero(nz, ny);
    out.counts.resize(nz, ny);

    for (Eigen::Index l = 0; l < nz; ++l) {
        for (Eigen::Index k = 0; k < ny; ++k) {
            std::complex<double> acc = 0.0;
            for (Eigen::Index n2 = 0; n2 + k < ny; ++n2) {
                const Eigen::Index n1 = n2 + k;
                for (Eigen::Index m2 = 0; m2 + l < nz; ++m2) {
                    const Eigen::Index m1 = m2 + l;
                    acc += corr.matrix(n1 * nz + m1, n2 * nz + m2);
                }
            }
            const auto count = static_cast<int>((nz - l) * (ny - k));
            out.counts(l, k) = count;
            out.lags(l, k) = mode == LagNormalization::Average ? acc / static_cast<double>(count) : acc;
        }
    }
    return out;
}

Eigen::MatrixXcd theoretical_correlation(const ArrayGeometry& geom,
                                         std::span<const SourceSpec> sources, std::size_t frame,
                                         double noise_power)
{
    const auto dim = static_cast<Eigen::Index>(geom.element_count());
    Eigen::MatrixXcd r = noise_power * Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto& src : sources) {
        if (!src.active_in(frame))
            continue;
        const Eigen::VectorXcd a = steering_vector(geom, src.direction_at(frame));
        r.noalias() += src.power * (a * a.adjoint());
    }
    return r;
}

void dump_complex64(const std::filesystem::path& bin_path, const Eigen::MatrixXcd& m,
                    std::uint64_t seed, const std::string& scenario_hash,
                    const std::string& description)
{
    {
        std::ofstream os(bin_path, std::ios::binary);
        if (!os)
            throw std::runtime_error("cannot open " + bin_path.string() + " for writing");
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                write_le<float>(os, static_cast<float>(m(r, c).real()));
                write_le<float>(os, static_cast<float>(m(r, c).imag()));
            }
        if (!os)
            throw std::runtime_error("write failed for " + bin_path.string());
    }

    nlohmann::json sidecar = {
        {"format", "complex64-le"},
        {"layout", "row-major, interleaved re/im"},
        {"rows", m.rows()},
        {"cols", m.cols()},
        {"seed", seed},
        {"scenario_hash", scenario_hash},
        {"content", description},
    };
    std::ofstream js(bin_path.string() + ".json");
    js << sidecar.dump(2) << '\n';
}

Eigen::MatrixXcd load_complex64(const std::filesystem::path& bin_path)
{
    std::ifstream js(bin_path.string() + ".json");
    if (!js)
        throw FormatError("missing sidecar for " + bin_path.string());
    const auto sidecar = nlohmann::json::parse(js);
    const auto rows = sidecar.at("rows").get<Eigen::Index>();
    const auto cols = sidecar.at("cols").get<Eigen::Index>();

    std::ifstream is(bin_path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open " + bin_path.string());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const float re = read_le<float>(is);
            const float im = read_le<float>(is);
            m(r, c) = {re, im};
        }
    return m;
}

} // namespace rfiscope
