// Copyright (c) 2026, The cellpilot Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef CELLPILOT_TEXT_UTIL_HPP_
#define CELLPILOT_TEXT_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cellpilot {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

std::vector<std::string> split_ws(std::string_view line);

/// Strict numeric parse of a whole token; throws std::invalid_argument.
double parse_double(const std::string& token);
long long parse_int(const std::string& token);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace cellpilot

#endif  // CELLPILOT_TEXT_UTIL_HPP_
