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

// CSV ingestion and the plain-text schema file.
//
// Schema file format, one `key = value` pair per line, `#` starts a comment:
//
//   label = class
//   column = parents | categorical | usual, pretentious, great_pret
//   column = age | numeric
//
// `column` lines list every CSV column (features and label) with its kind
// and, for categorical columns, the category order that defines the codes.
// Category strings may not contain '|' or ','.

#ifndef PRIVTREE_DATASET_IO_H_
#define PRIVTREE_DATASET_IO_H_

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privtree/dataset.h"

namespace privtree {

struct CsvOptions {
  // Label column name; empty selects the last column.
  std::string label_column;
  // Fixed column layout. Without it, a column is numeric when every
  // non-missing cell parses as a number, otherwise categorical with
  // categories in lexicographic order.
  std::optional<Schema> schema_hint;
  // When false, the first record is data and `column_names` names columns.
  bool has_header = true;
  std::vector<std::string> column_names;
  std::vector<std::string> missing_tokens = {"", "?", "NA"};
  // Features allowed to hold missing cells. Missing labels are always
  // accepted (see FilterLabel).
  std::set<std::string> nullable_features;
};

absl::StatusOr<Dataset> ParseCsv(std::istream& input,
                                 const CsvOptions& options);
absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const CsvOptions& options);

// Writes the header and decoded rows; missing cells are written empty.
void WriteCsv(const Dataset& dataset, std::ostream& output);
absl::Status SaveCsv(const Dataset& dataset, const std::string& path);

std::string FormatSchema(const Schema& schema);
absl::StatusOr<Schema> ParseSchema(absl::string_view text);
absl::StatusOr<Schema> LoadSchema(const std::string& path);
absl::Status SaveSchema(const Schema& schema, const std::string& path);

// Streams RFC-4180 records. Blank lines are skipped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& input) : input_(input) {}

  // Reads the next record into `fields`; false at end of input.
  absl::StatusOr<bool> Next(std::vector<std::string>& fields);
  // 1-based physical line on which the last record started.
  int record_line() const { return record_line_; }

 private:
  std::istream& input_;
  int line_ = 1;
  int record_line_ = 0;
};

}  // namespace privtree

#endif  // PRIVTREE_DATASET_IO_H_
