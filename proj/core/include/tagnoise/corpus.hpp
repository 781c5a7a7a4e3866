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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace tagnoise {

/// Error raised by any validation or parsing failure in the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Ordered set of concept identifiers.
struct ConceptSet {
  std::vector<std::string> concepts;

  std::size_t size() const { return concepts.size(); }
  bool contains(const std::string& c) const;
  /// Throws if identifiers are empty or duplicated, or the set is empty.
  void validate() const;

  bool operator==(const ConceptSet&) const = default;
};

enum class TUnitKind { Token, Separator };

/// One textual unit: a token (word occurrence) or a separator (whitespace
/// and punctuation between tokens). In a document the two kinds strictly
/// alternate, tokens at even 0-based positions.
struct TUnit {
  TUnitKind kind = TUnitKind::Token;
  std::string text;
  std::optional<std::string> stem;  ///< externally supplied stem, if any
  std::optional<std::string> pos;   ///< externally supplied POS tag, if any

  bool operator==(const TUnit&) const = default;
};

/// A document: a non-empty alternating t-unit sequence that begins and
/// ends on a token.
struct Document {
  std::string id;
  std::vector<TUnit> tunits;

  std::size_t size() const { return tunits.size(); }
  std::size_t token_count() const { return (tunits.size() + 1) / 2; }
  bool is_token_index(std::size_t t) const { return t % 2 == 0; }
  /// Throws on alternation or endpoint violations, naming the document.
  void validate() const;

  bool operator==(const Document&) const = default;
};

/// A mention span over t-unit indices, inclusive; both ends are tokens.
struct MentionSpan {
  int start = 0;
  int end = 0;

  int token_length() const { return (end - start) / 2 + 1; }
  auto operator<=>(const MentionSpan&) const = default;
};

using SpanList = std::vector<MentionSpan>;

/// Per-t-unit binary labels for one concept over one document.
struct LabelSequence {
  std::string concept_id;
  std::vector<bool> labels;

  bool operator==(const LabelSequence&) const = default;
};

enum class IobTag : unsigned char { B = 0, I = 1, O = 2 };

char iob_tag_char(IobTag t);

/// Per-token IOB tags for one concept over one document.
struct IobSequence {
  std::string concept_id;
  std::vector<IobTag> tags;

  /// Throws if I appears first or follows O.
  void validate() const;

  bool operator==(const IobSequence&) const = default;
};

/// concept id -> span list
using ConceptAnnotations = std::map<std::string, SpanList>;
/// doc id -> concept annotations
using AnnotationSet = std::map<std::string, ConceptAnnotations>;

/// A corpus of documents with per-coder mention annotations.
///
/// Immutable once built/loaded; safe to share read-only across workers.
struct AnnotatedCorpus {
  ConceptSet concept_set;
  std::vector<Document> documents;
  /// coder id -> doc id -> concept id -> spans
  std::map<std::string, AnnotationSet> annotations;

  const Document& doc(const std::string& id) const;
  const Document& doc_at(std::size_t i) const { return documents[i]; }
  bool has_doc(const std::string& id) const;
  std::set<std::string> coders() const;
  std::vector<std::string> document_ids() const;

  /// Spans for (doc, coder, concept); empty list if the coder annotated the
  /// document but marked nothing. Throws if the coder did not annotate the
  /// document at all.
  const SpanList& spans(const std::string& coder, const std::string& doc_id,
                        const std::string& concept_id) const;
  bool coder_covers(const std::string& coder, const std::string& doc_id) const;

  /// Full validation of every invariant (alternation, span bounds, span
  /// ordering, concept coverage). Throws Error naming doc/coder/concept.
  void validate() const;

 private:
  mutable std::map<std::string, std::size_t> doc_index_;
  void build_index() const;
};

/// Per-coder, per-concept annotation statistics.
struct CorpusStats {
  struct Cell {
    long long tokens_annotated = 0;  // token t-units only
    long long mentions = 0;
    double mean_mention_tokens = 0.0;
  };
  /// coder -> concept -> cell
  std::map<std::string, std::map<std::string, Cell>> per_coder_concept;
  /// coder -> totals over concepts
  std::map<std::string, Cell> totals;
  /// coder -> mean mentions per concept per document
  std::map<std::string, double> mentions_per_concept_per_doc;
  std::size_t document_count = 0;
  std::size_t concept_count = 0;
};

// ---------------------------------------------------------------------------
// Span / label / IOB codecs
// ---------------------------------------------------------------------------

/// Throws unless spans are sorted, non-overlapping, token-aligned and
/// inside the document.
void validate_spans(const Document& doc, const SpanList& spans,
                    const std::string& context);

/// Expands mention spans into a per-t-unit label sequence. Tokens and
/// interior separators of each span are labelled; the separators flanking
/// a span stay unlabelled.
LabelSequence mentions_to_labels(const Document& doc, const SpanList& spans,
                                 const std::string& concept_id);

/// Inverse of mentions_to_labels: maximal labelled runs become spans.
SpanList labels_to_mentions(const LabelSequence& seq, const Document& doc);

/// Label sequence -> per-token IOB tags.
IobSequence to_iob(const LabelSequence& seq, const Document& doc);

/// Per-token IOB tags -> label sequence (separator labelled iff the
/// following token is tagged I).
LabelSequence from_iob(const IobSequence& tags, const Document& doc);

/// Table 1-style counts per coder and concept.
CorpusStats compute_stats(const AnnotatedCorpus& corpus);

// ---------------------------------------------------------------------------
// JSONL serialization
// ---------------------------------------------------------------------------

/// Parses the JSON-lines corpus format. Each line is one document:
///   {"id": str,
///    "tunits": [{"k": "T"|"S", "x": str, "stem"?: str, "pos"?: str}, ...],
///    "ann": {coder: {concept: [[start, end], ...]}}}
/// Indices are 0-based inclusive t-unit indices. Malformed records raise
/// Error with the line number; invariant violations name doc/coder/concept.
AnnotatedCorpus parse_corpus(std::istream& in);
AnnotatedCorpus parse_corpus_file(const std::string& path);

/// Serializes a corpus to the JSONL format. serialize then parse is the
/// identity on valid corpora. Every concept key is written explicitly for
/// every (doc, coder) pair so the concept set survives round trips.
void serialize_corpus(const AnnotatedCorpus& corpus, std::ostream& out);
void serialize_corpus_file(const AnnotatedCorpus& corpus, const std::string& path);

}  // namespace tagnoise
