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

#ifndef RFISCOPE_BINARY_IO_HPP
#define RFISCOPE_BINARY_IO_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <type_traits>

#include "rfiscope/errors.hpp"

namespace rfiscope {

// Little-endian scalar I/O for the on-disk formats.

template <typename T>
void write_le(std::ostream& os, T value)
{
    static_assert(std::is_arithmetic_v<T>);
    std::array<char, sizeof(T)> bytes{};
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& is)
{
    static_assert(std::is_arithmetic_v<T>);
    std::array<char, sizeof(T)> bytes{};
    if (!is.read(bytes.data(), sizeof(T)))
        throw FormatError("unexpected end of file");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

} // namespace rfiscope

#endif
