// Copyright 2026 The mdmica authors
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

#include "mdmica/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mdmica {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        size_t a = field.find_first_not_of(" \t\r");
        size_t b = field.find_last_not_of(" \t\r");
        out.push_back(a == std::string::npos ? std::string() : field.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto res = std::from_chars(begin, end, v);
    return res.ec == std::errc() && res.ptr == end;
}

}  // namespace

CsvMatrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvParseError("cannot open '" + path + "'");

    CsvMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t line_no = 0;
    size_t ncols = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_fields(line);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (size_t i = 0; i < fields.size(); ++i) {
            if (!parse_double(fields[i], row[i])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty() && !out.header) {
                out.header = fields;
                ncols = fields.size();
                continue;
            }
            throw CsvParseError(path + ": line " + std::to_string(line_no) + ": non-numeric field");
        }
        if (ncols == 0) ncols = fields.size();
        if (fields.size() != ncols) {
            throw CsvParseError(path + ": line " + std::to_string(line_no) + ": expected " +
                                std::to_string(ncols) + " fields, got " + std::to_string(fields.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvParseError(path + ": no data rows");

    out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < ncols; ++c) {
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv_matrix(const std::string& path, const Matrix& M, const std::vector<std::string>* header) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    if (header) {
        for (size_t i = 0; i < header->size(); ++i) {
            if (i) out << ',';
            out << (*header)[i];
        }
        out << '\n';
    }
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            if (c) out << ',';
            out << format_double(M(r, c));
        }
        out << '\n';
    }
}

}  // namespace mdmica
