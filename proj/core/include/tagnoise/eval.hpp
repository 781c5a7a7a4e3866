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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tagnoise/corpus.hpp"

namespace tagnoise {

/// 2x2 contingency counts over t-units (tokens and separators both count).
struct ContingencyTable {
  long long tp = 0, fp = 0, fn = 0, tn = 0;

  long long n() const { return tp + fp + fn + tn; }
  ContingencyTable& operator+=(const ContingencyTable& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend ContingencyTable operator+(ContingencyTable a, const ContingencyTable& b) {
    return a += b;
  }
  bool operator==(const ContingencyTable&) const = default;
};

/// F1 over a t-unit table: 2TP / (2TP + FP + FN). The empty case
/// TP = FP = FN = 0 counts as 1 (everything correctly negative).
double f1(const ContingencyTable& t);
/// TP / (TP + FP); 1 when no positives were predicted.
double precision(const ContingencyTable& t);
/// TP / (TP + FN); 1 when there are no actual positives.
double recall(const ContingencyTable& t);

struct KappaResult {
  double p_a = 0.0;
  double p_e = 0.0;
  double kappa = 0.0;
};

/// Cohen's kappa over a pooled 2x2 table with the marginal-product chance
/// model. Throws for n = 0. The degenerate P_E = 1 case is reported as
/// kappa = 1 when agreement is also perfect, and is an error otherwise.
KappaResult cohen_kappa(const ContingencyTable& t);

/// Per-concept and averaged token-and-separator metrics.
struct EvalReport {
  std::map<std::string, ContingencyTable> per_concept;
  std::map<std::string, double> f1_per_concept;
  std::map<std::string, double> precision_per_concept;
  std::map<std::string, double> recall_per_concept;
  ContingencyTable pooled;  ///< sum over concepts
  double f1_micro = 0.0;
  double f1_macro = 0.0;
  double precision_micro = 0.0;
  double recall_micro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
};

/// Counts each t-unit of the document into exactly one cell.
ContingencyTable tunit_table(const LabelSequence& pred, const LabelSequence& gold);

/// Micro (pooled-table) and macro (mean of per-concept values) averaging.
EvalReport micro_macro(const std::map<std::string, ContingencyTable>& tables);

/// Pools all (t-unit, concept) agreement decisions of two coders over the
/// given documents into one table, then applies cohen_kappa. Both coders
/// must cover every listed document.
KappaResult pooled_kappa(const AnnotatedCorpus& corpus, const std::string& coder_a,
                         const std::string& coder_b, const std::vector<std::string>& doc_ids,
                         const std::vector<std::string>& concepts);

/// Same, over externally supplied annotation sets (doc id -> concept -> spans).
KappaResult pooled_kappa_sets(const std::vector<const Document*>& docs,
                              const AnnotationSet& ann_a, const AnnotationSet& ann_b,
                              const std::vector<std::string>& concepts);

/// Per-document per-concept tables, the exchange format consumed by the
/// approximate randomization test.
struct DocTables {
  /// doc id -> concept -> table
  std::map<std::string, std::map<std::string, ContingencyTable>> tables;

  EvalReport pooled_report() const;
};

/// CSV row schema: doc_id,concept,tp,fp,fn,tn ('#' lines are metadata).
void write_doc_tables_csv(const DocTables& tables, std::ostream& out,
                          const std::vector<std::string>& meta_lines);
DocTables read_doc_tables_csv(std::istream& in);
DocTables read_doc_tables_file(const std::string& path);

/// Report CSV: one row per concept plus micro and macro rows.
void write_report_csv(const EvalReport& report, std::ostream& out,
                      const std::vector<std::string>& meta_lines);
/// Report as a JSON object (same content as the CSV).
std::string report_to_json(const EvalReport& report);

}  // namespace tagnoise
