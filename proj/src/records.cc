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

#include "closedie/records.h"

#include <algorithm>

#include "closedie/errors.h"
#include "closedie/pipeline.h"
#include "closedie/util.h"
#include "json.hpp"

namespace closedie {

using Json = nlohmann::ordered_json;

namespace {

std::string IdString(const Json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw LoadError("\"id\" must be a string or integer");
}

const Json &Require(const Json &obj, const char *key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw LoadError(std::string("missing field \"") + key + "\"");
  }
  return *it;
}

MentionSpan ParseSpan(const Json &j, bool accept_dates) {
  if (!j.is_object()) throw LoadError("span must be an object");
  MentionSpan span;
  span.start = Require(j, "start").get<size_t>();
  span.end = Require(j, "end").get<size_t>();
  span.surface = Require(j, "surface").get<std::string>();
  auto link = j.find("link");
  if (link != j.end() && !link->is_null()) {
    span.link = link->get<std::string>();
    if (span.link->empty()) throw LoadError("empty span link");
  } else if (accept_dates) {
    auto date = j.find("date");
    if (date != j.end() && !date->is_null()) {
      span.link = MapDateToYear(date->get<std::string>());
    }
  }
  return span;
}

LinkedSentence ParseSentence(const Json &j, bool accept_dates) {
  LinkedSentence s;
  s.text = Require(j, "text").get<std::string>();
  const Json &spans = Require(j, "spans");
  if (!spans.is_array()) throw LoadError("\"spans\" must be an array");
  for (const Json &sp : spans) s.spans.push_back(ParseSpan(sp, accept_dates));
  if (auto it = j.find("url_domain"); it != j.end() && it->is_string()) {
    s.url_domain = it->get<std::string>();
  }
  if (auto it = j.find("is_negative"); it != j.end() && it->is_boolean()) {
    s.is_negative = it->get<bool>();
  }
  return s;
}

template <typename Fn>
auto ReadJsonl(const std::string &path, Fn parse) {
  std::vector<decltype(parse(std::string()))> out;
  size_t lineno = 0;
  for (const std::string &line : ReadLines(path)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(parse(line));
    } catch (const LoadError &e) {
      throw LoadError(path, lineno, e.what());
    } catch (const Json::exception &e) {
      throw LoadError(path, lineno, e.what());
    }
  }
  return out;
}

Json SpanToJson(const MentionSpan &span) {
  Json j;
  j["start"] = span.start;
  j["end"] = span.end;
  j["surface"] = span.surface;
  j["link"] = span.link ? Json(*span.link) : Json(nullptr);
  return j;
}

}  // namespace

size_t LinkedSentence::NumLinked() const {
  return static_cast<size_t>(std::count_if(
      spans.begin(), spans.end(), [](const MentionSpan &s) { return s.linked(); }));
}

std::optional<size_t> LinkedSentence::FirstOffsetOf(
    const std::string &value) const {
  std::optional<size_t> best;
  for (const MentionSpan &s : spans) {
    if (s.link && *s.link == value && (!best || s.start < *best)) {
      best = s.start;
    }
  }
  return best;
}

void ValidateSpans(const LinkedSentence &sentence) {
  size_t length = Utf8Length(sentence.text);
  size_t prev_end = 0;
  for (size_t i = 0; i < sentence.spans.size(); ++i) {
    const MentionSpan &s = sentence.spans[i];
    if (s.start >= s.end || s.end > length) {
      throw LoadError("span [" + std::to_string(s.start) + "," +
                      std::to_string(s.end) + ") outside text of length " +
                      std::to_string(length));
    }
    if (i > 0 && s.start < prev_end) {
      throw LoadError("span at " + std::to_string(s.start) +
                      " overlaps or is out of order");
    }
    size_t b = *Utf8ByteOffset(sentence.text, s.start);
    size_t e = *Utf8ByteOffset(sentence.text, s.end);
    if (sentence.text.compare(b, e - b, s.surface) != 0) {
      throw LoadError("span surface \"" + s.surface +
                      "\" does not match text at " + std::to_string(s.start));
    }
    prev_end = s.end;
  }
}

DatasetRecord ParseLinkedSentence(const std::string &json_line) {
  Json j = Json::parse(json_line);
  DatasetRecord r;
  r.id = IdString(Require(j, "id"));
  r.sentence = ParseSentence(j, /*accept_dates=*/true);
  std::stable_sort(r.sentence.spans.begin(), r.sentence.spans.end(),
                   [](const MentionSpan &a, const MentionSpan &b) {
                     return a.start < b.start;
                   });
  ValidateSpans(r.sentence);
  return r;
}

DatasetRecord ParseDatasetRecord(const std::string &json_line) {
  Json j = Json::parse(json_line);
  DatasetRecord r;
  r.id = IdString(Require(j, "id"));
  r.sentence = ParseSentence(j, /*accept_dates=*/false);
  ValidateSpans(r.sentence);
  if (auto it = j.find("triples"); it != j.end()) {
    for (const Json &t : *it) {
      r.triples.push_back({Require(t, "head").get<std::string>(),
                           Require(t, "pid").get<std::string>(),
                           Require(t, "tail").get<std::string>()});
    }
  }
  return r;
}

std::vector<DatasetRecord> ReadLinkedSentences(const std::string &path) {
  return ReadJsonl(path, ParseLinkedSentence);
}

std::vector<DatasetRecord> ReadDataset(const std::string &path) {
  return ReadJsonl(path, ParseDatasetRecord);
}

std::string DatasetRecordToJson(const DatasetRecord &record) {
  Json j;
  j["id"] = record.id;
  j["text"] = record.sentence.text;
  Json spans = Json::array();
  for (const MentionSpan &s : record.sentence.spans) spans.push_back(SpanToJson(s));
  j["spans"] = std::move(spans);
  Json triples = Json::array();
  for (const Triple &t : record.triples) {
    triples.push_back(Json{{"head", t.head}, {"pid", t.relation}, {"tail", t.tail}});
  }
  j["triples"] = std::move(triples);
  j["is_negative"] = record.sentence.is_negative;
  if (!record.sentence.url_domain.empty()) {
    j["url_domain"] = record.sentence.url_domain;
  }
  return j.dump();
}

void WriteDataset(const std::string &path,
                  const std::vector<DatasetRecord> &records) {
  std::string out;
  for (const DatasetRecord &r : records) {
    out += DatasetRecordToJson(r);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<Prediction> ReadPredictions(const std::string &path) {
  return ReadJsonl(path, [](const std::string &line) {
    Json j = Json::parse(line);
    return Prediction{IdString(Require(j, "id")),
                      Require(j, "output").get<std::string>()};
  });
}

void WritePredictions(const std::string &path,
                      const std::vector<Prediction> &predictions) {
  std::string out;
  for (const Prediction &p : predictions) {
    out += Json{{"id", p.id}, {"output", p.output}}.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::string TrainingInstanceToJson(const TrainingInstance &instance) {
  return Json{{"input", instance.input}, {"target", instance.target}}.dump();
}

std::string DualTargetInstanceToJson(const DualTargetInstance &instance) {
  return Json{{"input", instance.input},
              {"target_ie", instance.target_ie},
              {"target_el", instance.target_el}}
      .dump();
}

}  // namespace closedie
