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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdmica/types.hpp"

namespace mdmica {

/// Malformed CSV input; the message names the offending line.
class CsvParseError : public Error {
public:
    using Error::Error;
};

/// Comma-separated numeric matrix with '.' decimals. A single header row is
/// auto-detected (first row with any non-numeric field) and returned
/// separately.
struct CsvMatrix {
    Matrix values;
    std::optional<std::vector<std::string>> header;
};

CsvMatrix read_csv_matrix(const std::string& path);

/// Shortest round-trip decimal formatting of a double.
std::string format_double(double v);

void write_csv_matrix(const std::string& path, const Matrix& M,
                      const std::vector<std::string>* header = nullptr);

}  // namespace mdmica
