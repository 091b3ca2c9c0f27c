/*
 * Copyright 2026 The pamkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PAMKIT_CSV_H_
#define PAMKIT_CSV_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pamkit {

// A parsed CSV file with a required header row. Quoted fields, doubled
// quotes, CRLF line ends and a leading UTF-8 BOM are accepted.
class CsvTable {
 public:
  CsvTable() = default;
  CsvTable(std::vector<std::string> header,
           std::vector<std::vector<std::string>> rows);

  static CsvTable Parse(std::string_view text);
  static CsvTable Read(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> FindColumn(std::string_view name) const;
  // Throws "missing required column '<name>'".
  std::size_t Column(std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Quotes a field only when it contains a comma, quote or line break.
std::string CsvEscape(std::string_view field);
std::string CsvLine(const std::vector<std::string>& fields);  // ends in "\n"

// Writes header plus rows with LF line ends.
void WriteCsv(const std::filesystem::path& path,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

// Strict number parsing for CSV cells; the whole trimmed cell must parse.
double ParseDouble(std::string_view text, std::string_view what);

}  // namespace pamkit

#endif  // PAMKIT_CSV_H_
