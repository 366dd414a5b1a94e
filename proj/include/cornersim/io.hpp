// Copyright 2026 The cornersim authors.
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

#include <fstream>
#include <string>
#include <vector>

namespace cornersim {

/// Shortest-roundtrip decimal form of a double; deterministic across runs.
std::string format_double(double x);

/// Minimal CSV emitter: one header, rows of numeric/text cells.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);

    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    void row_values(const std::vector<double>& values);

  private:
    std::ofstream out_;
};

void write_text_file(const std::string& path, const std::string& content);

/// Creates the parent directory of a file path if missing.
void ensure_parent_dir(const std::string& path);

} // namespace cornersim
