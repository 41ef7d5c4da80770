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

#include "rfiscope/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include <fftw3.h>

namespace rfiscope {

namespace {

constexpr double kArgSlack = 1e-12;
constexpr double kCosFloor = 1e-12;

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex g_plan_mutex;

struct FftwBuffer {
    explicit FftwBuffer(std::size_t n)
        : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (!data)
            throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

class Plan2d {
public:
    Plan2d(std::size_t rows, std::size_t cols, fftw_complex* in, fftw_complex* out)
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        plan_ = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), in, out,
                                 FFTW_FORWARD, FFTW_ESTIMATE);
        if (!plan_)
            throw std::runtime_error("FFTW planning failed");
    }
    ~Plan2d()
    {
        std::lock_guard<std::mutex> lock(g_plan_mutex);
        fftw_destroy_plan(plan_);
    }
    Plan2d(const Plan2d&) = delete;
    Plan2d& operator=(const Plan2d&) = delete;
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

std::size_t wrap(int centered, std::size_t n)
{
    const auto ni = static_cast<int>(n);
    return static_cast<std::size_t>(((centered % ni) + ni) % ni);
}

std::optional<double> safe_asin(double arg)
{
    if (!std::isfinite(arg) || std::abs(arg) > 1.0 + kArgSlack)
        return std::nullopt;
    return std::asin(std::clamp(arg, -1.0, 1.0));
}

} // namespace

void ImageSize::validate(const ArrayGeometry& geom) const
{
    if (u_fft % 2 != 0 || v_fft % 2 != 0 || u_fft == 0 || v_fft == 0)
        throw std::invalid_argument("DFT sizes must be positive and even");
    if (u_fft < geom.n_y || v_fft < geom.n_z) {
        std::ostringstream msg;
        msg << "DFT size " << u_fft << "x" << v_fft << " smaller than the " << geom.n_y << "x"
            << geom.n_z << " lag grid";
        throw std::invalid_argument(msg.str());
    }
}

Bin DirtyImage::argmax() const
{
    Eigen::Index r = 0, c = 0;
    pixels.maxCoeff(&r, &c);
    return bin_of(r, c);
}

Eigen::MatrixXcd lag_spectrum(const LagCorrelation& lags, const ArrayGeometry& geom,
                              const ImageSize& size)
{
    size.validate(geom);
    const auto ny = static_cast<Eigen::Index>(geom.n_y);
    const auto nz = static_cast<Eigen::Index>(geom.n_z);
    if (lags.lags.rows() != nz || lags.lags.cols() != ny)
        throw std::invalid_argument("lag matrix does not match array geometry");

    const std::size_t U = size.u_fft;
    const std::size_t V = size.v_fft;
    const double scale = 1.0 / static_cast<double>(geom.element_count());

    FftwBuffer in(U * V);
    FftwBuffer out(U * V);
    Plan2d plan(U, V, in.data, out.data);

    std::fill_n(&in.data[0][0], 2 * U * V, 0.0);
    // Row index k (y lag) pairs with u, column index l (z lag) with v.
    for (Eigen::Index k = 0; k < ny; ++k)
        for (Eigen::Index l = 0; l < nz; ++l) {
            const std::complex<double> val = lags.lags(l, k) * scale;
            const std::size_t idx = static_cast<std::size_t>(k) * V + static_cast<std::size_t>(l);
            in.data[idx][0] = val.real();
            in.data[idx][1] = val.imag();
        }
    plan.execute();

    Eigen::MatrixXcd spec(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(V));
    for (std::size_t r = 0; r < U; ++r) {
        const std::size_t src_r = wrap(static_cast<int>(r) - static_cast<int>(U / 2), U);
        for (std::size_t c = 0; c < V; ++c) {
            const std::size_t src_c = wrap(static_cast<int>(c) - static_cast<int>(V / 2), V);
            const std::size_t idx = src_r * V + src_c;
            spec(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {out.data[idx][0],
                                                                              out.data[idx][1]};
        }
    }
    return spec;
}

DirtyImage dirty_image(const LagCorrelation& lags, const ArrayGeometry& geom, const ImageSize& size)
{
    const Eigen::MatrixXcd spec = lag_spectrum(lags, geom, size);
    const std::size_t U = size.u_fft;
    const std::size_t V = size.v_fft;

    DirtyImage img;
    img.size = size;
    const auto rows = static_cast<Eigen::Index>(U);
    const auto cols = static_cast<Eigen::Index>(V);
    img.pixels.resize(rows, cols);
    img.azimuth.resize(rows, cols);
    img.elevation.resize(cols);
    img.valid.resize(rows, cols);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index c = 0; c < cols; ++c) {
        const int v = static_cast<int>(c) - static_cast<int>(V / 2);
        const auto el = bin_to_elevation(v, V, geom);
        img.elevation(c) = el.value_or(nan);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const int u = static_cast<int>(r) - static_cast<int>(U / 2);
            std::optional<double> az;
            if (el)
                az = bin_to_azimuth(u, U, *el, geom);
            img.valid(r, c) = az.has_value();
            img.azimuth(r, c) = az.value_or(nan);
            img.pixels(r, c) = az ? std::abs(spec(r, c)) : 0.0;
        }
    }
    return img;
}

std::optional<double> bin_to_elevation(int v, std::size_t v_fft, const ArrayGeometry& geom)
{
    return safe_asin(static_cast<double>(v) / static_cast<double>(v_fft) * geom.wavelength / geom.d_z);
}

std::optional<double> bin_to_azimuth(int u, std::size_t u_fft, double elevation,
                                     const ArrayGeometry& geom)
{
    const double c = std::cos(elevation);
    if (!std::isfinite(c) || std::abs(c) < kCosFloor)
        return std::nullopt;
    return safe_asin(static_cast<double>(u) / static_cast<double>(u_fft) * geom.wavelength / geom.d_y / c);
}

Bin angles_to_bin(const Direction& dir, const ArrayGeometry& geom, const ImageSize& size)
{
    try {
        dir.validate();
    } catch (const std::invalid_argument& e) {
        throw std::out_of_range(e.what());
    }
    const double U = static_cast<double>(size.u_fft);
    const double V = static_cast<double>(size.v_fft);
    const double v = std::round(V * std::sin(dir.elevation) * geom.d_z / geom.wavelength);
    const double u =
        std::round(U * std::cos(dir.elevation) * std::sin(dir.azimuth) * geom.d_y / geom.wavelength);
    if (v < -V / 2 || v > V / 2 - 1 || u < -U / 2 || u > U / 2 - 1) {
        std::ostringstream msg;
        msg << "direction (" << dir.azimuth_deg() << " deg, " << dir.elevation_deg()
            << " deg) maps outside the " << size.u_fft << "x" << size.v_fft << " bin grid";
        throw std::out_of_range(msg.str());
    }
    return {static_cast<int>(u), static_cast<int>(v)};
}

Direction bin_to_direction(Bin bin, const ArrayGeometry& geom, const ImageSize& size)
{
    const auto el = bin_to_elevation(bin.v, size.v_fft, geom);
    const auto az = el ? bin_to_azimuth(bin.u, size.u_fft, *el, geom) : std::nullopt;
    if (!az) {
        std::ostringstream msg;
        msg << "bin (" << bin.u << ", " << bin.v << ") is outside the visible region";
        throw std::out_of_range(msg.str());
    }
    return {*az, *el};
}

void write_pgm(const std::filesystem::path& path, const Eigen::MatrixXd& pixels)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    const Eigen::Index width = pixels.rows();
    const Eigen::Index height = pixels.cols();
    const double peak = pixels.size() > 0 ? pixels.maxCoeff() : 0.0;
    os << "P5\n" << width << ' ' << height << "\n255\n";
    for (Eigen::Index row = 0; row < height; ++row) {
        const Eigen::Index c = height - 1 - row;
        for (Eigen::Index r = 0; r < width; ++r) {
            const double x = peak > 0.0 ? pixels(r, c) / peak : 0.0;
            const auto byte = static_cast<unsigned char>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
            os.put(static_cast<char>(byte));
        }
    }
}

void write_image_csv(const std::filesystem::path& path, const DirtyImage& img)
{
    write_image_csv(path, img, img.pixels);
}

void write_image_csv(const std::filesystem::path& path, const DirtyImage& img,
                     const Eigen::MatrixXd& pixels)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << "u,v,azimuth_deg,elevation_deg,power\n";
    os.precision(10);
    for (Eigen::Index r = 0; r < pixels.rows(); ++r)
        for (Eigen::Index c = 0; c < pixels.cols(); ++c) {
            const Bin b = img.bin_of(r, c);
            os << b.u << ',' << b.v << ',';
            if (img.valid(r, c))
                os << rad_to_deg(img.azimuth(r, c)) << ',' << rad_to_deg(img.elevation(c));
            else
                os << "nan,nan";
            os << ',' << pixels(r, c) << '\n';
        }
}

} // namespace rfiscope
