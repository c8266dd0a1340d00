// Copyright 2026 The closedie Authors.
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

#ifndef CLOSEDIE_RECORDS_H_
#define CLOSEDIE_RECORDS_H_

#include <optional>
#include <string>
#include <vector>

#include "closedie/kb.h"

namespace closedie {

// A mention in a sentence. Offsets count Unicode code points, matching what
// Python-side entity linkers emit. `link` is an entity id, a year literal,
// or absent for mentions the linker left unresolved.
struct MentionSpan {
  size_t start = 0;
  size_t end = 0;
  std::string surface;
  std::optional<std::string> link;

  bool linked() const { return link.has_value(); }
  bool operator==(const MentionSpan &) const = default;
};

struct LinkedSentence {
  std::string text;
  std::vector<MentionSpan> spans;
  std::string url_domain;
  bool is_negative = false;

  size_t NumLinked() const;
  // First span offset whose link equals `value`, if any.
  std::optional<size_t> FirstOffsetOf(const std::string &value) const;
};

// Checks the span invariants: ordered by start, non-overlapping, within
// the text, and surface equal to the covered text. Throws LoadError.
void ValidateSpans(const LinkedSentence &sentence);

// One line of a dataset file.
struct DatasetRecord {
  std::string id;
  LinkedSentence sentence;
  std::vector<Triple> triples;
};

// Training instances produced by the target builders.
struct TrainingInstance {
  std::string input;
  std::string target;
  bool operator==(const TrainingInstance &) const = default;
  auto operator<=>(const TrainingInstance &) const = default;
};

struct DualTargetInstance {
  std::string input;
  std::string target_ie;
  std::string target_el;
  bool operator==(const DualTargetInstance &) const = default;
};

// Model output for one instance.
struct Prediction {
  std::string id;
  std::string output;
};

// JSON Lines readers and writers. Readers throw LoadError with the file
// name and line number on malformed records.

// Entity-linker output: {"id","text","spans":[{"start","end","surface",
// "link"|"date"}],"url_domain"}. Date spans are mapped to years; dates that
// cannot be mapped become unlinked spans.
std::vector<DatasetRecord> ReadLinkedSentences(const std::string &path);

std::vector<DatasetRecord> ReadDataset(const std::string &path);
std::string DatasetRecordToJson(const DatasetRecord &record);
void WriteDataset(const std::string &path,
                  const std::vector<DatasetRecord> &records);

std::vector<Prediction> ReadPredictions(const std::string &path);
void WritePredictions(const std::string &path,
                      const std::vector<Prediction> &predictions);

std::string TrainingInstanceToJson(const TrainingInstance &instance);
std::string DualTargetInstanceToJson(const DualTargetInstance &instance);

// Parsing from a single JSON text, used by the readers and by bindings.
DatasetRecord ParseDatasetRecord(const std::string &json_line);
DatasetRecord ParseLinkedSentence(const std::string &json_line);

}  // namespace closedie

#endif  // CLOSEDIE_RECORDS_H_
