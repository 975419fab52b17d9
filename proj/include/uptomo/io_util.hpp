// Copyright 2026 The uptomo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace uptomo {

// Atomic file write: contents go to a temporary sibling first, then a rename
// replaces the target, so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Shortest decimal form of a binary64 value that parses back to the same
/// bits. Used for all CSV output.
std::string format_double(double value);

/// Current wall-clock time as "YYYY-MM-DDTHH:MM:SSZ" (UTC).
std::string iso8601_utc_now();

}  // namespace uptomo
