// Copyright 2026 The tagnoise Authors
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

#include "tagnoise/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tagnoise {

using nlohmann::json;

bool ConceptSet::contains(const std::string& c) const {
  return std::find(concepts.begin(), concepts.end(), c) != concepts.end();
}

void ConceptSet::validate() const {
  if (concepts.empty()) throw Error("concept set is empty");
  std::set<std::string> seen;
  for (const auto& c : concepts) {
    if (c.empty()) throw Error("concept set contains an empty identifier");
    if (!seen.insert(c).second) throw Error("duplicate concept identifier '" + c + "'");
  }
}

char iob_tag_char(IobTag t) {
  switch (t) {
    case IobTag::B: return 'B';
    case IobTag::I: return 'I';
    default: return 'O';
  }
}

namespace {

bool is_ws_or_punct(unsigned char c) {
  return std::isspace(c) || std::ispunct(c);
}

bool has_whitespace(const std::string& s) {
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

void Document::validate() const {
  if (tunits.empty()) throw Error("document '" + id + "': empty t-unit sequence");
  for (std::size_t t = 0; t < tunits.size(); ++t) {
    const TUnit& u = tunits[t];
    bool should_be_token = (t % 2 == 0);
    if ((u.kind == TUnitKind::Token) != should_be_token) {
      throw Error("document '" + id + "': t-unit kinds do not alternate at index " +
                  std::to_string(t));
    }
    if (u.kind == TUnitKind::Token) {
      if (u.text.empty())
        throw Error("document '" + id + "': empty token at index " + std::to_string(t));
      if (has_whitespace(u.text))
        throw Error("document '" + id + "': token contains whitespace at index " +
                    std::to_string(t));
    } else {
      if (u.text.empty())
        throw Error("document '" + id + "': empty separator at index " + std::to_string(t));
      for (unsigned char c : u.text) {
        if (!is_ws_or_punct(c))
          throw Error("document '" + id +
                      "': separator contains non-whitespace/punctuation at index " +
                      std::to_string(t));
      }
    }
  }
  if (tunits.back().kind != TUnitKind::Token)
    throw Error("document '" + id + "': last t-unit is not a token");
}

void IobSequence::validate() const {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == IobTag::I) {
      if (i == 0)
        throw Error("IOB sequence for '" + concept_id + "': I at first token");
      if (tags[i - 1] == IobTag::O)
        throw Error("IOB sequence for '" + concept_id + "': I follows O at token " +
                    std::to_string(i));
    }
  }
}

const Document& AnnotatedCorpus::doc(const std::string& id) const {
  build_index();
  auto it = doc_index_.find(id);
  if (it == doc_index_.end()) throw Error("unknown document id '" + id + "'");
  return documents[it->second];
}

bool AnnotatedCorpus::has_doc(const std::string& id) const {
  build_index();
  return doc_index_.count(id) > 0;
}

void AnnotatedCorpus::build_index() const {
  if (doc_index_.size() == documents.size() && !documents.empty()) return;
  doc_index_.clear();
  for (std::size_t i = 0; i < documents.size(); ++i) doc_index_[documents[i].id] = i;
}

std::set<std::string> AnnotatedCorpus::coders() const {
  std::set<std::string> out;
  for (const auto& [coder, _] : annotations) out.insert(coder);
  return out;
}

std::vector<std::string> AnnotatedCorpus::document_ids() const {
  std::vector<std::string> ids;
  ids.reserve(documents.size());
  for (const auto& d : documents) ids.push_back(d.id);
  return ids;
}

bool AnnotatedCorpus::coder_covers(const std::string& coder,
                                   const std::string& doc_id) const {
  auto cit = annotations.find(coder);
  if (cit == annotations.end()) return false;
  return cit->second.count(doc_id) > 0;
}

const SpanList& AnnotatedCorpus::spans(const std::string& coder, const std::string& doc_id,
                                       const std::string& concept_id) const {
  static const SpanList kEmpty;
  auto cit = annotations.find(coder);
  if (cit == annotations.end()) throw Error("unknown coder '" + coder + "'");
  auto dit = cit->second.find(doc_id);
  if (dit == cit->second.end())
    throw Error("coder '" + coder + "' has no annotations for document '" + doc_id + "'");
  auto kit = dit->second.find(concept_id);
  if (kit == dit->second.end()) return kEmpty;
  return kit->second;
}

void AnnotatedCorpus::validate() const {
  concept_set.validate();
  std::set<std::string> ids;
  for (const auto& d : documents) {
    d.validate();
    if (!ids.insert(d.id).second) throw Error("duplicate document id '" + d.id + "'");
  }
  for (const auto& [coder, per_doc] : annotations) {
    for (const auto& [doc_id, per_concept] : per_doc) {
      if (!ids.count(doc_id))
        throw Error("coder '" + coder + "' references unknown document '" + doc_id + "'");
      const Document& d = doc(doc_id);
      for (const auto& [concept_id, span_list] : per_concept) {
        if (!concept_set.contains(concept_id))
          throw Error("doc '" + doc_id + "' coder '" + coder +
                      "': unknown concept '" + concept_id + "'");
        validate_spans(d, span_list,
                       "doc '" + doc_id + "' coder '" + coder + "' concept '" + concept_id + "'");
      }
      // Every annotated (doc, coder) pair must cover all concepts.
      for (const auto& c : concept_set.concepts) {
        if (!per_concept.count(c))
          throw Error("doc '" + doc_id + "' coder '" + coder + "': missing concept '" + c +
                      "' (empty span lists must be explicit)");
      }
    }
  }
}

void validate_spans(const Document& doc, const SpanList& spans, const std::string& context) {
  int prev_end = -2;
  for (const MentionSpan& s : spans) {
    if (s.start > s.end)
      throw Error(context + ": span end " + std::to_string(s.end) + " before start " +
                  std::to_string(s.start));
    if (s.start < 0 || static_cast<std::size_t>(s.end) >= doc.size())
      throw Error(context + ": span [" + std::to_string(s.start) + "," +
                  std::to_string(s.end) + "] out of bounds (|x| = " +
                  std::to_string(doc.size()) + ")");
    if (s.start % 2 != 0 || s.end % 2 != 0)
      throw Error(context + ": span [" + std::to_string(s.start) + "," +
                  std::to_string(s.end) + "] points at a separator");
    if (s.start <= prev_end)
      throw Error(context + ": spans overlap or are unsorted near t-unit " +
                  std::to_string(s.start));
    prev_end = s.end;
  }
}

LabelSequence mentions_to_labels(const Document& doc, const SpanList& spans,
                                 const std::string& concept_id) {
  validate_spans(doc, spans, "concept '" + concept_id + "' in doc '" + doc.id + "'");
  LabelSequence seq;
  seq.concept_id = concept_id;
  seq.labels.assign(doc.size(), false);
  for (const MentionSpan& s : spans) {
    for (int t = s.start; t <= s.end; ++t) seq.labels[static_cast<std::size_t>(t)] = true;
  }
  return seq;
}

SpanList labels_to_mentions(const LabelSequence& seq, const Document& doc) {
  if (seq.labels.size() != doc.size())
    throw Error("label sequence length " + std::to_string(seq.labels.size()) +
                " does not match doc '" + doc.id + "' length " + std::to_string(doc.size()));
  SpanList spans;
  std::size_t t = 0;
  while (t < seq.labels.size()) {
    if (!seq.labels[t]) {
      ++t;
      continue;
    }
    std::size_t start = t;
    while (t + 1 < seq.labels.size() && seq.labels[t + 1]) ++t;
    std::size_t end = t;
    if (start % 2 != 0 || end % 2 != 0)
      throw Error("doc '" + doc.id + "' concept '" + seq.concept_id +
                  "': labelled run [" + std::to_string(start) + "," + std::to_string(end) +
                  "] starts or ends on a separator");
    spans.push_back({static_cast<int>(start), static_cast<int>(end)});
    ++t;
  }
  return spans;
}

IobSequence to_iob(const LabelSequence& seq, const Document& doc) {
  if (seq.labels.size() != doc.size())
    throw Error("label sequence length does not match doc '" + doc.id + "'");
  IobSequence out;
  out.concept_id = seq.concept_id;
  std::size_t n_tokens = doc.token_count();
  out.tags.resize(n_tokens);
  for (std::size_t j = 0; j < n_tokens; ++j) {
    std::size_t t = 2 * j;
    if (!seq.labels[t]) {
      out.tags[j] = IobTag::O;
    } else if (j > 0 && seq.labels[t - 1]) {
      out.tags[j] = IobTag::I;  // separator before the token is inside the mention
    } else {
      out.tags[j] = IobTag::B;
    }
  }
  return out;
}

LabelSequence from_iob(const IobSequence& tags, const Document& doc) {
  if (tags.tags.size() != doc.token_count())
    throw Error("IOB sequence length " + std::to_string(tags.tags.size()) +
                " does not match token count of doc '" + doc.id + "'");
  tags.validate();
  LabelSequence out;
  out.concept_id = tags.concept_id;
  out.labels.assign(doc.size(), false);
  for (std::size_t j = 0; j < tags.tags.size(); ++j) {
    if (tags.tags[j] == IobTag::O) continue;
    out.labels[2 * j] = true;
    if (tags.tags[j] == IobTag::I) out.labels[2 * j - 1] = true;
  }
  return out;
}

CorpusStats compute_stats(const AnnotatedCorpus& corpus) {
  CorpusStats stats;
  stats.document_count = corpus.documents.size();
  stats.concept_count = corpus.concept_set.size();
  for (const auto& [coder, per_doc] : corpus.annotations) {
    std::size_t docs_covered = 0;
    for (const auto& [doc_id, per_concept] : per_doc) {
      ++docs_covered;
      for (const auto& [concept_id, span_list] : per_concept) {
        auto& cell = stats.per_coder_concept[coder][concept_id];
        for (const MentionSpan& s : span_list) {
          cell.tokens_annotated += s.token_length();
          cell.mentions += 1;
        }
      }
    }
    // Ensure all concepts appear even when never annotated.
    for (const auto& c : corpus.concept_set.concepts) stats.per_coder_concept[coder][c];
    auto& total = stats.totals[coder];
    for (auto& [concept_id, cell] : stats.per_coder_concept[coder]) {
      cell.mean_mention_tokens =
          cell.mentions > 0 ? static_cast<double>(cell.tokens_annotated) /
                                  static_cast<double>(cell.mentions)
                            : 0.0;
      total.tokens_annotated += cell.tokens_annotated;
      total.mentions += cell.mentions;
    }
    total.mean_mention_tokens =
        total.mentions > 0 ? static_cast<double>(total.tokens_annotated) /
                                 static_cast<double>(total.mentions)
                           : 0.0;
    double pairs = static_cast<double>(docs_covered) *
                   static_cast<double>(corpus.concept_set.size());
    stats.mentions_per_concept_per_doc[coder] =
        pairs > 0 ? static_cast<double>(total.mentions) / pairs : 0.0;
  }
  return stats;
}

// ---------------------------------------------------------------------------
// JSONL codec
// ---------------------------------------------------------------------------

namespace {

Document parse_document(const json& j, std::size_t line_no) {
  Document d;
  if (!j.is_object() || !j.contains("id") || !j.contains("tunits"))
    throw Error("line " + std::to_string(line_no) + ": record is not a document object");
  d.id = j.at("id").get<std::string>();
  for (const auto& ju : j.at("tunits")) {
    TUnit u;
    std::string k = ju.at("k").get<std::string>();
    if (k == "T")
      u.kind = TUnitKind::Token;
    else if (k == "S")
      u.kind = TUnitKind::Separator;
    else
      throw Error("line " + std::to_string(line_no) + ": bad t-unit kind '" + k + "'");
    u.text = ju.at("x").get<std::string>();
    if (ju.contains("stem")) u.stem = ju.at("stem").get<std::string>();
    if (ju.contains("pos")) u.pos = ju.at("pos").get<std::string>();
    d.tunits.push_back(std::move(u));
  }
  return d;
}

}  // namespace

AnnotatedCorpus parse_corpus(std::istream& in) {
  AnnotatedCorpus corpus;
  std::set<std::string> concept_names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    Document d = parse_document(j, line_no);
    if (j.contains("ann")) {
      for (const auto& [coder, per_concept] : j.at("ann").items()) {
        ConceptAnnotations ann;
        for (const auto& [concept_id, spans] : per_concept.items()) {
          SpanList list;
          for (const auto& js : spans) {
            if (!js.is_array() || js.size() != 2)
              throw Error("line " + std::to_string(line_no) + ": span for doc '" + d.id +
                          "' coder '" + coder + "' concept '" + concept_id +
                          "' is not a [start, end] pair");
            list.push_back({js.at(0).get<int>(), js.at(1).get<int>()});
          }
          std::sort(list.begin(), list.end());
          ann[concept_id] = std::move(list);
          concept_names.insert(concept_id);
        }
        corpus.annotations[coder][d.id] = std::move(ann);
      }
    }
    corpus.documents.push_back(std::move(d));
  }
  if (in.bad()) throw Error("I/O error while reading corpus");
  corpus.concept_set.concepts.assign(concept_names.begin(), concept_names.end());
  // Canonicalize: explicit (possibly empty) span list for every concept.
  for (auto& [coder, per_doc] : corpus.annotations)
    for (auto& [doc_id, per_concept] : per_doc)
      for (const auto& c : corpus.concept_set.concepts) per_concept[c];
  corpus.validate();
  return corpus;
}

AnnotatedCorpus parse_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  try {
    return parse_corpus(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void serialize_corpus(const AnnotatedCorpus& corpus, std::ostream& out) {
  for (const Document& d : corpus.documents) {
    json j;
    j["id"] = d.id;
    json tunits = json::array();
    for (const TUnit& u : d.tunits) {
      json ju;
      ju["k"] = (u.kind == TUnitKind::Token) ? "T" : "S";
      ju["x"] = u.text;
      if (u.stem) ju["stem"] = *u.stem;
      if (u.pos) ju["pos"] = *u.pos;
      tunits.push_back(std::move(ju));
    }
    j["tunits"] = std::move(tunits);
    json ann = json::object();
    for (const auto& [coder, per_doc] : corpus.annotations) {
      auto dit = per_doc.find(d.id);
      if (dit == per_doc.end()) continue;
      json per_concept = json::object();
      for (const auto& c : corpus.concept_set.concepts) {
        json spans = json::array();
        auto kit = dit->second.find(c);
        if (kit != dit->second.end()) {
          for (const MentionSpan& s : kit->second) spans.push_back({s.start, s.end});
        }
        per_concept[c] = std::move(spans);
      }
      ann[coder] = std::move(per_concept);
    }
    j["ann"] = std::move(ann);
    out << j.dump() << '\n';
  }
}

void serialize_corpus_file(const AnnotatedCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  serialize_corpus(corpus, out);
  if (!out) throw Error("I/O error while writing '" + path + "'");
}

}  // namespace tagnoise
