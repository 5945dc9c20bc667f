/*
 * Copyright 2026 The rosbl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rosbl/core.hpp"

namespace rosbl {

// Matrix CSV: one row per line, comma separated, no header. Values are
// written in shortest round-trip form, so write followed by read is exact.

Matrix parse_matrix_csv(std::string_view text, const std::string& source = "<memory>");
Matrix read_matrix_csv(const std::filesystem::path& path);

std::string format_matrix_csv(const Matrix& M);
void write_matrix_csv(const Matrix& M, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Write `contents` to a sibling temp file, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace rosbl
