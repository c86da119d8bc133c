//
// Copyright 2026 The privtree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privtree/dataset_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "privtree/status_macros.h"

namespace privtree {
namespace {

std::optional<double> ParseNumber(absl::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || std::isnan(value)) {
    return std::nullopt;
  }
  return value;
}

struct Record {
  int line;
  std::vector<std::string> fields;
};

}  // namespace

absl::StatusOr<bool> CsvReader::Next(std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool started = false;
  int c;
  while ((c = input_.get()) != EOF) {
    const char ch = static_cast<char>(c);
    if (!started) {
      if (ch == '\n') {
        ++line_;
        continue;
      }
      if (ch == '\r' && input_.peek() == '\n') continue;
      started = true;
      record_line_ = line_;
    }
    if (in_quotes) {
      if (ch == '"') {
        if (input_.peek() == '"') {
          input_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r' && input_.peek() == '\n') {
      continue;
    } else if (ch == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", record_line_, ": unterminated quoted field"));
  }
  if (!started) return false;
  fields.push_back(std::move(field));
  return true;
}

absl::StatusOr<Dataset> ParseCsv(std::istream& input,
                                 const CsvOptions& options) {
  CsvReader reader(input);
  std::vector<std::string> header;
  if (options.has_header) {
    ASSIGN_OR_RETURN(const bool has_record, reader.Next(header));
    if (!has_record) return absl::InvalidArgumentError("empty CSV input");
    for (std::string& name : header) {
      name = std::string(absl::StripAsciiWhitespace(name));
    }
  } else {
    header = options.column_names;
    if (header.empty()) {
      return absl::InvalidArgumentError(
          "column_names are required when the CSV has no header");
    }
  }
  const size_t num_columns = header.size();

  std::string label_name = options.label_column;
  if (label_name.empty() && options.schema_hint) {
    label_name = options.schema_hint->label.name;
  }
  if (label_name.empty()) label_name = header.back();
  const auto label_it = std::find(header.begin(), header.end(), label_name);
  if (label_it == header.end()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label column \"", label_name, "\" not in header"));
  }
  const size_t label_column = label_it - header.begin();
  if (options.schema_hint && options.schema_hint->label.name != label_name) {
    return absl::InvalidArgumentError(
        absl::StrCat("schema label \"", options.schema_hint->label.name,
                     "\" differs from label column \"", label_name, "\""));
  }

  std::vector<Record> records;
  for (;;) {
    Record record;
    ASSIGN_OR_RETURN(const bool more, reader.Next(record.fields));
    if (!more) break;
    const int start = reader.record_line();
    record.line = start;
    if (record.fields.size() != num_columns) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: expected %d fields, got %d", start,
                          num_columns, record.fields.size()));
    }
    for (std::string& field : record.fields) {
      field = std::string(absl::StripAsciiWhitespace(field));
    }
    records.push_back(std::move(record));
  }

  const auto is_missing = [&](const std::string& cell) {
    return std::find(options.missing_tokens.begin(),
                     options.missing_tokens.end(),
                     cell) != options.missing_tokens.end();
  };

  // Column metadata, in CSV column order.
  std::vector<FeatureMeta> columns(num_columns);
  for (size_t c = 0; c < num_columns; ++c) {
    if (options.schema_hint) {
      const Schema& hint = *options.schema_hint;
      if (c == label_column) {
        columns[c] = hint.label;
      } else if (auto index = hint.FeatureIndex(header[c])) {
        columns[c] = hint.features[*index];
      } else {
        return absl::InvalidArgumentError(absl::StrCat(
            "column \"", header[c], "\" is not described by the schema"));
      }
      continue;
    }
    FeatureMeta& meta = columns[c];
    meta.name = header[c];
    bool numeric = c != label_column;
    std::set<std::string> seen;
    for (const Record& record : records) {
      const std::string& cell = record.fields[c];
      if (is_missing(cell)) continue;
      seen.insert(cell);
      if (numeric && !ParseNumber(cell)) numeric = false;
    }
    if (numeric && !seen.empty()) {
      meta.kind = FeatureKind::kNumeric;
    } else {
      meta.kind = FeatureKind::kCategorical;
      meta.categories.assign(seen.begin(), seen.end());
    }
  }
  if (options.schema_hint &&
      options.schema_hint->features.size() + 1 != num_columns) {
    return absl::InvalidArgumentError(
        "schema describes columns missing from the CSV header");
  }

  Schema schema;
  schema.label = columns[label_column];
  std::vector<size_t> feature_columns;
  for (size_t c = 0; c < num_columns; ++c) {
    if (c == label_column) continue;
    columns[c].index = static_cast<int>(feature_columns.size());
    schema.features.push_back(columns[c]);
    feature_columns.push_back(c);
  }
  schema.label.index = static_cast<int>(schema.features.size());

  std::vector<double> values;
  values.reserve(records.size() * feature_columns.size());
  std::vector<int> labels;
  labels.reserve(records.size());
  for (const Record& record : records) {
    for (size_t f = 0; f < feature_columns.size(); ++f) {
      const FeatureMeta& meta = schema.features[f];
      const std::string& cell = record.fields[feature_columns[f]];
      if (is_missing(cell)) {
        if (!options.nullable_features.contains(meta.name)) {
          return absl::InvalidArgumentError(absl::StrCat(
              "line ", record.line, ": missing value for \"", meta.name, "\""));
        }
        values.push_back(kMissingValue);
      } else if (meta.is_categorical()) {
        const auto code = meta.Encode(cell);
        if (!code) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", record.line, ": unknown category \"", cell,
                           "\" for \"", meta.name, "\""));
        }
        values.push_back(*code);
      } else {
        const auto number = ParseNumber(cell);
        if (!number) {
          return absl::InvalidArgumentError(
              absl::StrCat("line ", record.line, ": \"", cell,
                           "\" is not a number (\"", meta.name, "\")"));
        }
        values.push_back(*number);
      }
    }
    const std::string& cell = record.fields[label_column];
    if (is_missing(cell)) {
      labels.push_back(kMissingLabel);
    } else {
      const auto code = schema.label.Encode(cell);
      if (!code) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", record.line, ": unknown label \"", cell, "\""));
      }
      labels.push_back(*code);
    }
  }
  return Dataset::Create(std::move(schema), std::move(values),
                         std::move(labels));
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const CsvOptions& options) {
  std::ifstream input(path, std::ios::binary);
  if (!input) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto dataset = ParseCsv(input, options);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrCat(path, ": ", dataset.status().message()));
  }
  return dataset;
}

namespace {

std::string QuoteCsv(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void WriteCsv(const Dataset& dataset, std::ostream& output) {
  std::vector<std::string> cells;
  for (const FeatureMeta& meta : dataset.features()) {
    cells.push_back(QuoteCsv(meta.name));
  }
  cells.push_back(QuoteCsv(dataset.label_meta().name));
  output << absl::StrJoin(cells, ",") << "\n";
  for (size_t r = 0; r < dataset.num_rows(); ++r) {
    cells.clear();
    for (size_t f = 0; f < dataset.num_features(); ++f) {
      const double v = dataset.value(r, f);
      const FeatureMeta& meta = dataset.feature(f);
      if (IsMissing(v)) {
        cells.emplace_back();
      } else if (meta.is_categorical()) {
        cells.push_back(QuoteCsv(meta.Decode(static_cast<int>(v))));
      } else {
        cells.push_back(absl::StrFormat("%.17g", v));
      }
    }
    const int label = dataset.label(r);
    cells.push_back(label == kMissingLabel
                        ? std::string()
                        : QuoteCsv(dataset.label_meta().Decode(label)));
    output << absl::StrJoin(cells, ",") << "\n";
  }
}

absl::Status SaveCsv(const Dataset& dataset, const std::string& path) {
  std::ofstream output(path, std::ios::binary);
  if (!output)
    return absl::UnavailableError(absl::StrCat("cannot write ", path));
  WriteCsv(dataset, output);
  return output ? absl::OkStatus()
                : absl::DataLossError(absl::StrCat("write failed: ", path));
}

namespace {

std::string FormatColumn(const FeatureMeta& meta) {
  std::string line =
      absl::StrCat("column = ", meta.name, " | ", FeatureKindName(meta.kind));
  if (meta.is_categorical()) {
    absl::StrAppend(&line, " | ", absl::StrJoin(meta.categories, ", "));
  }
  return line;
}

}  // namespace

std::string FormatSchema(const Schema& schema) {
  std::string out = "# privtree schema v1\n";
  absl::StrAppend(&out, "label = ", schema.label.name, "\n");
  for (const FeatureMeta& meta : schema.features) {
    absl::StrAppend(&out, FormatColumn(meta), "\n");
  }
  absl::StrAppend(&out, FormatColumn(schema.label), "\n");
  return out;
}

absl::StatusOr<Schema> ParseSchema(absl::string_view text) {
  std::string label_name;
  std::vector<FeatureMeta> columns;
  int line_number = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_number;
    absl::string_view line = absl::StripAsciiWhitespace(raw);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema line ", line_number, ": expected key = value"));
    }
    const absl::string_view key =
        absl::StripAsciiWhitespace(line.substr(0, eq));
    const absl::string_view value =
        absl::StripAsciiWhitespace(line.substr(eq + 1));
    if (key == "label") {
      label_name = std::string(value);
    } else if (key == "column") {
      std::vector<absl::string_view> parts = absl::StrSplit(value, '|');
      if (parts.size() < 2 || parts.size() > 3) {
        return absl::InvalidArgumentError(absl::StrCat(
            "schema line ", line_number, ": expected name | kind [| cats]"));
      }
      FeatureMeta meta;
      meta.name = std::string(absl::StripAsciiWhitespace(parts[0]));
      ASSIGN_OR_RETURN(meta.kind,
                       ParseFeatureKind(absl::StripAsciiWhitespace(parts[1])));
      if (parts.size() == 3) {
        for (absl::string_view category : absl::StrSplit(parts[2], ',')) {
          meta.categories.emplace_back(absl::StripAsciiWhitespace(category));
        }
      }
      columns.push_back(std::move(meta));
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema line ", line_number, ": unknown key \"", key, "\""));
    }
  }
  if (label_name.empty()) {
    return absl::InvalidArgumentError("schema has no label line");
  }
  Schema schema;
  bool found_label = false;
  for (FeatureMeta& meta : columns) {
    if (meta.name == label_name) {
      schema.label = std::move(meta);
      found_label = true;
    } else {
      meta.index = static_cast<int>(schema.features.size());
      schema.features.push_back(std::move(meta));
    }
  }
  if (!found_label) {
    return absl::InvalidArgumentError(
        absl::StrCat("label \"", label_name, "\" has no column line"));
  }
  schema.label.index = static_cast<int>(schema.features.size());
  RETURN_IF_ERROR(schema.Validate());
  return schema;
}

absl::StatusOr<Schema> LoadSchema(const std::string& path) {
  std::ifstream input(path);
  if (!input) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << input.rdbuf();
  return ParseSchema(buffer.str());
}

absl::Status SaveSchema(const Schema& schema, const std::string& path) {
  std::ofstream output(path);
  if (!output)
    return absl::UnavailableError(absl::StrCat("cannot write ", path));
  output << FormatSchema(schema);
  return absl::OkStatus();
}

}  // namespace privtree
