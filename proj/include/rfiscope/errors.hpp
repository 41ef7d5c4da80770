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

#ifndef RFISCOPE_ERRORS_HPP
#define RFISCOPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rfiscope {

// Invalid scenario, manifest or run configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or truncated artifact on disk.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient during optimisation.
class TrainingFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void log_warning(const std::string& message);
void log_info(const std::string& message);
void set_verbose(bool on);

} // namespace rfiscope

#endif
