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

#include "pamkit/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pamkit/error.h"

namespace pamkit {

CsvTable::CsvTable(std::vector<std::string> header,
                   std::vector<std::vector<std::string>> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {}

CsvTable CsvTable::Parse(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A line holding nothing at all is skipped.
    if (!(record.size() == 1 && record[0].empty() && !field_started)) {
      records.push_back(std::move(record));
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw Error("csv line " + std::to_string(line) + ": stray quote in field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error("csv: unterminated quoted field");
  if (field_started || !field.empty()) end_record();

  if (records.empty()) throw Error("csv: missing header row");
  std::vector<std::string> header = std::move(records.front());
  records.erase(records.begin());
  for (std::size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw Error("csv row " + std::to_string(r + 1) + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(records[r].size()));
    }
  }
  return CsvTable(std::move(header), std::move(records));
}

CsvTable CsvTable::Read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return Parse(buffer.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::optional<std::size_t> CsvTable::FindColumn(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::Column(std::string_view name) const {
  if (auto i = FindColumn(name)) return *i;
  throw Error("missing required column '" + std::string(name) + "'");
}

std::string CsvEscape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += CsvEscape(fields[i]);
  }
  out += '\n';
  return out;
}

void WriteCsv(const std::filesystem::path& path,
              const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot write");
  out << CsvLine(header);
  for (const auto& row : rows) out << CsvLine(row);
  if (!out) throw Error(path.string() + ": write failed");
}

double ParseDouble(std::string_view text, std::string_view what) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || end != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace pamkit
