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

#include <atomic>
#include <iostream>
#include <mutex>

#include "rfiscope/errors.hpp"

namespace rfiscope {

namespace {
std::mutex g_log_mutex;
std::atomic<bool> g_verbose{false};
} // namespace

void set_verbose(bool on) { g_verbose = on; }

void log_warning(const std::string& message)
{
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << "warning: " << message << '\n';
}

void log_info(const std::string& message)
{
    if (!g_verbose)
        return;
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::cerr << message << '\n';
}

} // namespace rfiscope
