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

// Python bindings. Triples cross the boundary as (head, relation, tail)
// tuples; sentences and records as their JSONL text.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <functional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "closedie/decode.h"
#include "closedie/errors.h"
#include "closedie/eval.h"
#include "closedie/kb.h"
#include "closedie/linearize.h"
#include "closedie/pipeline.h"
#include "closedie/records.h"
#include "closedie/scorers.h"
#include "closedie/tokenizer.h"
#include "closedie/trie.h"

namespace py = pybind11;

namespace closedie {
namespace {

using PyTriple = std::tuple<std::string, std::string, std::string>;
using PyScorer =
    std::function<std::vector<double>(std::vector<TokenId>, std::vector<TokenId>)>;

std::vector<Triple> ToTriples(const std::vector<PyTriple> &in) {
  std::vector<Triple> out;
  out.reserve(in.size());
  for (const auto &[h, r, t] : in) out.push_back({h, r, t});
  return out;
}

std::vector<PyTriple> FromTriples(const std::vector<Triple> &in) {
  std::vector<PyTriple> out;
  out.reserve(in.size());
  for (const Triple &t : in) out.emplace_back(t.head, t.relation, t.tail);
  return out;
}

std::vector<PyTriple> FromRaw(const std::vector<RawTriple> &in) {
  std::vector<PyTriple> out;
  out.reserve(in.size());
  for (const RawTriple &t : in) out.emplace_back(t.head_label, t.relation_label, t.tail_label);
  return out;
}

LinkedSentence Sentence(const std::string &json_line) {
  return ParseLinkedSentence(json_line).sentence;
}

// Owns the tries so that constraints outlive a single call.
struct KbDecoder {
  ByteTokenizer tok;
  KbTries tries;
  KbDecoder(const KbStore &kb, bool years) : tries(BuildKbTries(kb, tok, years)) {}
};

py::dict ReportDict(const EvalReport &r) {
  py::dict d;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["accuracy_negative"] = r.accuracy_negative;
  d["empty_positive_rate"] = r.empty_positive_rate;
  d["tp"] = r.counts.tp;
  d["fp"] = r.counts.fp;
  d["fn"] = r.counts.fn;
  d["n_pos"] = r.counts.n_pos;
  d["n_neg"] = r.counts.n_neg;
  return d;
}

}  // namespace
}  // namespace closedie

PYBIND11_MODULE(_core, m) {
  using namespace closedie;
  m.doc() = "Closed information extraction toolkit";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<LoadError>(m, "LoadError", error.ptr());
  py::register_exception<IntegrityError>(m, "IntegrityError", error.ptr());
  py::register_exception<ResolveError>(m, "ResolveError", error.ptr());
  py::register_exception<ConstraintViolation>(m, "ConstraintViolation", error.ptr());
  py::register_exception<DecodeFailure>(m, "DecodeFailure", error.ptr());
  py::register_exception<ScorerError>(m, "ScorerError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());

  py::class_<KbStore>(m, "KbStore")
      .def(py::init<>())
      .def_static("load", &KbStore::Load, py::arg("entities"), py::arg("relations"),
                  py::arg("triples"))
      .def("add_entity", &KbStore::AddEntity, py::arg("qid"), py::arg("title"))
      .def(
          "add_relation",
          [](KbStore &kb, std::string pid, std::string label) {
            kb.AddRelation(std::move(pid), std::move(label));
          },
          py::arg("pid"), py::arg("label"))
      .def(
          "add_triple",
          [](KbStore &kb, const std::string &h, const std::string &r, const std::string &t) {
            return kb.AddTriple({h, r, t});
          },
          py::arg("head"), py::arg("relation"), py::arg("tail"))
      .def(
          "relations_between",
          [](const KbStore &kb, const std::string &h, const std::string &t) {
            const auto &s = kb.RelationsBetween(h, t);
            return std::vector<std::string>(s.begin(), s.end());
          },
          py::arg("head"), py::arg("tail"))
      .def("resolve_title", &KbStore::ResolveTitle)
      .def("entity_label", &KbStore::EntityLabel)
      .def("relation_label", &KbStore::RelationLabel)
      .def_property_readonly("num_entities", &KbStore::num_entities)
      .def_property_readonly("num_relations", &KbStore::num_relations)
      .def_property_readonly("num_triples", &KbStore::num_triples);

  m.def(
      "order_triples",
      [](const std::vector<PyTriple> &t, const std::string &sentence) {
        return FromTriples(OrderTriples(ToTriples(t), Sentence(sentence)));
      },
      py::arg("triples"), py::arg("sentence_json"));
  m.def(
      "linearize",
      [](const std::vector<PyTriple> &t, const KbStore &kb) {
        return Linearize(ToTriples(t), kb).text;
      },
      py::arg("triples"), py::arg("kb"));
  m.def(
      "parse_linearized", [](const std::string &text) { return FromRaw(ParseLinearized(text)); },
      py::arg("text"));
  m.def(
      "entity_prompt_target",
      [](const std::string &sentence, const std::vector<PyTriple> &t, const KbStore &kb) {
        return BuildEntityPromptTarget(Sentence(sentence), ToTriples(t), kb).text;
      },
      py::arg("sentence_json"), py::arg("triples"), py::arg("kb"));
  m.def(
      "el_chain",
      [](const std::string &sentence, const std::vector<PyTriple> &t, const KbStore &kb) {
        return BuildElChain(Sentence(sentence), ToTriples(t), kb);
      },
      py::arg("sentence_json"), py::arg("triples"), py::arg("kb"));
  m.def(
      "artificial_prompt_instances",
      [](const std::string &sentence, const std::string &el, const std::string &tri) {
        auto [a, b] = BuildArtificialPromptInstances(Sentence(sentence), el, tri);
        return std::make_pair(std::make_pair(a.input, a.target),
                              std::make_pair(b.input, b.target));
      },
      py::arg("sentence_json"), py::arg("el_target"), py::arg("triple_target"));
  m.def("combine_losses", &CombineLosses, py::arg("l_ie"), py::arg("l_el"), py::arg("alpha"));

  m.def("map_date_to_year", &MapDateToYear, py::arg("surface"));
  m.def(
      "extract_ds_triples",
      [](const std::string &sentence, const KbStore &kb) {
        return FromTriples(ExtractDsTriples(Sentence(sentence), kb));
      },
      py::arg("sentence_json"), py::arg("kb"));
  m.def("split_sizes", &SplitSizes, py::arg("n"), py::arg("ratios"));
  m.def("split_indices", &SplitIndices, py::arg("n"), py::arg("ratios"), py::arg("seed"));

  py::class_<ByteTokenizer>(m, "ByteTokenizer")
      .def(py::init<>())
      .def("encode", &ByteTokenizer::Encode)
      .def("decode",
           [](const ByteTokenizer &t, const std::vector<TokenId> &ids) { return t.Decode(ids); })
      .def_property_readonly("vocab_size", &ByteTokenizer::VocabSize)
      .def_property_readonly("eos_id",
                             [](const ByteTokenizer &t) { return t.SpecialId(Special::kEos); });

  py::class_<ConstraintTrie>(m, "ConstraintTrie")
      .def_static(
          "build",
          [](const std::vector<std::string> &labels) {
            return ConstraintTrie::Build(labels, ByteTokenizer());
          },
          py::arg("labels"))
      .def("contains",
           [](const ConstraintTrie &t, const std::vector<TokenId> &s) { return t.Contains(s); })
      .def("allowed_continuations",
           [](const ConstraintTrie &t, const std::vector<TokenId> &prefix) {
             Continuations c = t.AllowedContinuations(prefix);
             return std::make_pair(c.tokens, c.complete);
           })
      .def("serialize", [](const ConstraintTrie &t) { return py::bytes(t.Serialize()); })
      .def_static("deserialize",
                  [](const py::bytes &b) { return ConstraintTrie::Deserialize(std::string(b)); })
      .def_property_readonly("num_nodes", &ConstraintTrie::num_nodes)
      .def_property_readonly("num_sequences", &ConstraintTrie::num_sequences);

  py::class_<KbDecoder>(m, "KbDecoder")
      .def(py::init<const KbStore &, bool>(), py::arg("kb"), py::arg("years") = true)
      .def_property_readonly(
          "tokenizer", [](const KbDecoder &d) { return d.tok; })
      .def(
          "decode",
          [](KbDecoder &d, const PyScorer &fn, const std::string &mode, size_t beam,
             size_t max_len) {
            FunctionScorer scorer(
                [&fn](std::span<const TokenId> prefix, std::span<const TokenId> candidates) {
                  return fn(std::vector<TokenId>(prefix.begin(), prefix.end()),
                            std::vector<TokenId>(candidates.begin(), candidates.end()));
                });
            BeamOptions opt;
            opt.mode = ParseDecodeMode(mode);
            opt.beam_size = beam;
            opt.max_len = max_len;
            Constraints c(d.tries, d.tok);
            std::vector<std::pair<std::string, double>> out;
            for (const Hypothesis &h : BeamSearch(scorer, d.tok, &c, opt)) {
              out.emplace_back(HypothesisText(h, d.tok), h.score);
            }
            return out;
          },
          py::arg("scorer"), py::arg("mode") = "constrained", py::arg("beam") = 4,
          py::arg("max_len") = 256,
          "Beam search. `scorer(prefix, candidates)` returns one log-probability per "
          "candidate.");

  m.def(
      "score_predictions",
      [](const std::vector<std::pair<std::string, std::string>> &predictions,
         const std::vector<std::string> &gold_json, const KbStore &kb) {
        std::vector<Prediction> pred;
        for (const auto &[id, text] : predictions) pred.push_back({id, text});
        std::vector<DatasetRecord> gold;
        for (const std::string &line : gold_json) gold.push_back(ParseDatasetRecord(line));
        return ReportDict(ScorePredictionFile(pred, gold, kb));
      },
      py::arg("predictions"), py::arg("gold_json"), py::arg("kb"));
}
