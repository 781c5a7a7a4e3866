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

#include "tagnoise/eval.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tagnoise {

double f1(const ContingencyTable& t) {
  if (t.tp == 0 && t.fp == 0 && t.fn == 0) return 1.0;
  return 2.0 * static_cast<double>(t.tp) /
         (2.0 * static_cast<double>(t.tp) + static_cast<double>(t.fp) +
          static_cast<double>(t.fn));
}

double precision(const ContingencyTable& t) {
  if (t.tp + t.fp == 0) return 1.0;
  return static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
}

double recall(const ContingencyTable& t) {
  if (t.tp + t.fn == 0) return 1.0;
  return static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
}

KappaResult cohen_kappa(const ContingencyTable& t) {
  long long n = t.n();
  if (n <= 0) throw Error("cohen_kappa: empty table");
  double dn = static_cast<double>(n);
  KappaResult r;
  r.p_a = static_cast<double>(t.tp + t.tn) / dn;
  double pred_pos = static_cast<double>(t.tp + t.fp) / dn;
  double true_pos = static_cast<double>(t.tp + t.fn) / dn;
  double pred_neg = static_cast<double>(t.fn + t.tn) / dn;
  double true_neg = static_cast<double>(t.fp + t.tn) / dn;
  r.p_e = pred_pos * true_pos + pred_neg * true_neg;
  if (r.p_e >= 1.0) {
    if (r.p_a >= 1.0) {
      r.kappa = 1.0;
      return r;
    }
    throw Error("cohen_kappa: chance agreement is 1 with imperfect agreement");
  }
  r.kappa = (r.p_a - r.p_e) / (1.0 - r.p_e);
  return r;
}

ContingencyTable tunit_table(const LabelSequence& pred, const LabelSequence& gold) {
  if (pred.labels.size() != gold.labels.size())
    throw Error("tunit_table: length mismatch (" + std::to_string(pred.labels.size()) +
                " vs " + std::to_string(gold.labels.size()) + ")");
  ContingencyTable t;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    bool p = pred.labels[i], g = gold.labels[i];
    if (p && g)
      ++t.tp;
    else if (p && !g)
      ++t.fp;
    else if (!p && g)
      ++t.fn;
    else
      ++t.tn;
  }
  return t;
}

EvalReport micro_macro(const std::map<std::string, ContingencyTable>& tables) {
  if (tables.empty()) throw Error("micro_macro: no concepts");
  EvalReport r;
  r.per_concept = tables;
  double f1_sum = 0.0, prec_sum = 0.0, rec_sum = 0.0;
  for (const auto& [concept_id, t] : tables) {
    double f = f1(t), p = precision(t), rc = recall(t);
    r.f1_per_concept[concept_id] = f;
    r.precision_per_concept[concept_id] = p;
    r.recall_per_concept[concept_id] = rc;
    f1_sum += f;
    prec_sum += p;
    rec_sum += rc;
    r.pooled += t;
  }
  double m = static_cast<double>(tables.size());
  r.f1_micro = f1(r.pooled);
  r.precision_micro = precision(r.pooled);
  r.recall_micro = recall(r.pooled);
  r.f1_macro = f1_sum / m;
  r.precision_macro = prec_sum / m;
  r.recall_macro = rec_sum / m;
  return r;
}

KappaResult pooled_kappa_sets(const std::vector<const Document*>& docs,
                              const AnnotationSet& ann_a, const AnnotationSet& ann_b,
                              const std::vector<std::string>& concepts) {
  ContingencyTable pooled;
  static const SpanList kEmpty;
  auto spans_of = [](const AnnotationSet& ann, const std::string& doc_id,
                     const std::string& concept_id) -> const SpanList& {
    auto dit = ann.find(doc_id);
    if (dit == ann.end())
      throw Error("pooled_kappa: annotations missing for document '" + doc_id + "'");
    auto kit = dit->second.find(concept_id);
    return kit == dit->second.end() ? kEmpty : kit->second;
  };
  for (const Document* d : docs) {
    for (const auto& concept_id : concepts) {
      LabelSequence a = mentions_to_labels(*d, spans_of(ann_a, d->id, concept_id), concept_id);
      LabelSequence b = mentions_to_labels(*d, spans_of(ann_b, d->id, concept_id), concept_id);
      pooled += tunit_table(a, b);
    }
  }
  return cohen_kappa(pooled);
}

KappaResult pooled_kappa(const AnnotatedCorpus& corpus, const std::string& coder_a,
                         const std::string& coder_b, const std::vector<std::string>& doc_ids,
                         const std::vector<std::string>& concepts) {
  auto ait = corpus.annotations.find(coder_a);
  auto bit = corpus.annotations.find(coder_b);
  if (ait == corpus.annotations.end()) throw Error("pooled_kappa: unknown coder '" + coder_a + "'");
  if (bit == corpus.annotations.end()) throw Error("pooled_kappa: unknown coder '" + coder_b + "'");
  std::vector<const Document*> docs;
  docs.reserve(doc_ids.size());
  for (const auto& id : doc_ids) {
    if (!corpus.coder_covers(coder_a, id) || !corpus.coder_covers(coder_b, id))
      throw Error("pooled_kappa: document '" + id + "' is not annotated by both coders");
    docs.push_back(&corpus.doc(id));
  }
  return pooled_kappa_sets(docs, ait->second, bit->second, concepts);
}

EvalReport DocTables::pooled_report() const {
  std::map<std::string, ContingencyTable> per_concept;
  for (const auto& [doc, concepts] : tables)
    for (const auto& [concept_id, t] : concepts) per_concept[concept_id] += t;
  return micro_macro(per_concept);
}

void write_doc_tables_csv(const DocTables& tables, std::ostream& out,
                          const std::vector<std::string>& meta_lines) {
  for (const auto& m : meta_lines) out << "# " << m << '\n';
  out << "doc_id,concept,tp,fp,fn,tn\n";
  for (const auto& [doc, concepts] : tables.tables)
    for (const auto& [concept_id, t] : concepts)
      out << doc << ',' << concept_id << ',' << t.tp << ',' << t.fp << ',' << t.fn << ','
          << t.tn << '\n';
}

DocTables read_doc_tables_csv(std::istream& in) {
  DocTables out;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "doc_id,concept,tp,fp,fn,tn")
        throw Error("doc-tables CSV line " + std::to_string(line_no) + ": unexpected header '" +
                    line + "'");
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    std::string doc, concept_id, field;
    if (!std::getline(ss, doc, ',') || !std::getline(ss, concept_id, ','))
      throw Error("doc-tables CSV line " + std::to_string(line_no) + ": malformed row");
    ContingencyTable t;
    long long* cells[4] = {&t.tp, &t.fp, &t.fn, &t.tn};
    for (long long* cell : cells) {
      if (!std::getline(ss, field, ','))
        throw Error("doc-tables CSV line " + std::to_string(line_no) + ": missing count");
      try {
        *cell = std::stoll(field);
      } catch (const std::exception&) {
        throw Error("doc-tables CSV line " + std::to_string(line_no) + ": bad count '" +
                    field + "'");
      }
      if (*cell < 0)
        throw Error("doc-tables CSV line " + std::to_string(line_no) + ": negative count");
    }
    out.tables[doc][concept_id] = t;
  }
  if (!header_seen) throw Error("doc-tables CSV: missing header row");
  return out;
}

DocTables read_doc_tables_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open doc-tables file '" + path + "'");
  try {
    return read_doc_tables_csv(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

namespace {

void append_row(std::ostream& out, const std::string& name, const ContingencyTable* t,
                double p, double r, double f) {
  out << name << ',';
  if (t)
    out << t->tp << ',' << t->fp << ',' << t->fn << ',' << t->tn << ',';
  else
    out << ",,,,";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f", p, r, f);
  out << buf << '\n';
}

}  // namespace

void write_report_csv(const EvalReport& report, std::ostream& out,
                      const std::vector<std::string>& meta_lines) {
  for (const auto& m : meta_lines) out << "# " << m << '\n';
  out << "concept,tp,fp,fn,tn,precision,recall,f1\n";
  for (const auto& [concept_id, t] : report.per_concept)
    append_row(out, concept_id, &t, report.precision_per_concept.at(concept_id),
               report.recall_per_concept.at(concept_id), report.f1_per_concept.at(concept_id));
  append_row(out, "micro", &report.pooled, report.precision_micro, report.recall_micro,
             report.f1_micro);
  append_row(out, "macro", nullptr, report.precision_macro, report.recall_macro,
             report.f1_macro);
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  for (const auto& [concept_id, t] : report.per_concept) {
    j["concepts"][concept_id] = {{"tp", t.tp},
                              {"fp", t.fp},
                              {"fn", t.fn},
                              {"tn", t.tn},
                              {"precision", report.precision_per_concept.at(concept_id)},
                              {"recall", report.recall_per_concept.at(concept_id)},
                              {"f1", report.f1_per_concept.at(concept_id)}};
  }
  j["micro"] = {{"precision", report.precision_micro},
                {"recall", report.recall_micro},
                {"f1", report.f1_micro}};
  j["macro"] = {{"precision", report.precision_macro},
                {"recall", report.recall_macro},
                {"f1", report.f1_macro}};
  return j.dump(2);
}

}  // namespace tagnoise
