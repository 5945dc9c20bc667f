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

#include "rosbl/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace rosbl {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string location(const std::string& source, std::size_t row, std::size_t col) {
    return source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

}  // namespace

Matrix parse_matrix_csv(std::string_view text, const std::string& source) {
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) {
            if (pos > text.size()) break;
            continue;
        }

        std::vector<double> row;
        std::size_t cell_start = 0;
        std::size_t col = 0;
        while (true) {
            ++col;
            auto comma = line.find(',', cell_start);
            const auto cell =
                trim(line.substr(cell_start, comma == std::string_view::npos ? line.npos : comma - cell_start));
            if (cell.empty()) {
                throw ParseError("empty cell at " + location(source, line_no, col));
            }
            const char* first = cell.data();
            if (*first == '+') ++first;
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
            if (ec != std::errc() || ptr != cell.data() + cell.size()) {
                throw ParseError("non-numeric cell '" + std::string(cell) + "' at " +
                                 location(source, line_no, col));
            }
            row.push_back(value);
            if (comma == std::string_view::npos) break;
            cell_start = comma + 1;
        }

        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("ragged row at " + location(source, line_no, row.size()) + ": expected " +
                             std::to_string(rows.front().size()) + " values, found " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }

    if (rows.empty()) {
        throw ParseError(source + ": empty matrix file");
    }

    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index r = 0; r < M.rows(); ++r) {
        for (Index c = 0; c < M.cols(); ++c) {
            M(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        }
    }
    return M;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    return parse_matrix_csv(read_text_file(path), path.string());
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        throw Error("failed to format floating-point value");
    }
    return std::string(buf, ptr);
}

std::string format_matrix_csv(const Matrix& M) {
    std::string out;
    out.reserve(static_cast<std::size_t>(M.size()) * 20);
    for (Index r = 0; r < M.rows(); ++r) {
        for (Index c = 0; c < M.cols(); ++c) {
            if (c) out += ',';
            out += format_double(M(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_matrix_csv(const Matrix& M, const std::filesystem::path& path) {
    write_file_atomic(path, format_matrix_csv(M));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace rosbl
