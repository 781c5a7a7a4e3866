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

#include <sstream>

#include "doctest.h"
#include "tagnoise/eval.hpp"
#include "tagnoise/rng.hpp"
#include "test_helpers.hpp"

using namespace tagnoise;
using namespace tagnoise::test;

TEST_CASE("f1 on fixed tables") {
  CHECK(f1({0, 0, 0, 9}) == 1.0);  // nothing to find, nothing claimed
  CHECK(f1({2, 1, 1, 0}) == doctest::Approx(2.0 * 2 / (4 + 1 + 1)));
  CHECK(f1({0, 3, 0, 5}) == 0.0);
  CHECK(f1({0, 0, 4, 5}) == 0.0);
}

TEST_CASE("f1 is symmetric in FP and FN") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    long long tp = static_cast<long long>(rng.below(20));
    long long fp = static_cast<long long>(rng.below(20));
    long long fn = static_cast<long long>(rng.below(20));
    CHECK(f1({tp, fp, fn, 1}) == f1({tp, fn, fp, 1}));
  }
}

TEST_CASE("precision and recall edge rules") {
  CHECK(precision({0, 0, 3, 5}) == 1.0);
  CHECK(recall({0, 3, 0, 5}) == 1.0);
  CHECK(precision({3, 1, 0, 0}) == doctest::Approx(0.75));
  CHECK(recall({3, 0, 1, 0}) == doctest::Approx(0.75));
}

TEST_CASE("tunit_table counts every t-unit exactly once") {
  LabelSequence gold{"c", {true, true, true, false, false, false, true, true, true}};
  LabelSequence pred = gold;
  ContingencyTable t = tunit_table(pred, gold);
  CHECK(t.tp == 6);
  CHECK(t.tn == 3);
  CHECK(t.fp == 0);
  CHECK(t.fn == 0);

  LabelSequence none{"c", std::vector<bool>(9, false)};
  t = tunit_table(none, gold);
  CHECK(t.fn == 6);
  CHECK(t.tn == 3);

  // Partial overlap gets partial credit: gold covers 5 t-units, prediction
  // covers 3 of them plus 1 outside.
  LabelSequence gold5{"c", {true, true, true, true, true, false, false}};
  LabelSequence pred3{"c", {false, false, true, true, true, false, true}};
  t = tunit_table(pred3, gold5);
  CHECK(t.tp == 3);
  CHECK(t.fn == 2);
  CHECK(t.fp == 1);
  CHECK(t.tn == 1);
  CHECK(t.n() == 7);

  LabelSequence shorter{"c", {true}};
  CHECK_THROWS_AS(tunit_table(shorter, gold), Error);
}

TEST_CASE("micro and macro averaging") {
  std::map<std::string, ContingencyTable> tables;
  tables["a"] = {100, 0, 0, 0};
  tables["b"] = {0, 50, 50, 0};
  EvalReport r = micro_macro(tables);
  CHECK(r.f1_per_concept["a"] == 1.0);
  CHECK(r.f1_per_concept["b"] == 0.0);
  CHECK(r.f1_macro == doctest::Approx(0.5));
  CHECK(r.f1_micro == doctest::Approx(200.0 / 300.0));

  // One concept: micro = macro = its F1.
  std::map<std::string, ContingencyTable> one;
  one["a"] = {2, 1, 1, 4};
  EvalReport r1 = micro_macro(one);
  CHECK(r1.f1_micro == doctest::Approx(r1.f1_macro));
  CHECK(r1.f1_micro == doctest::Approx(f1(one["a"])));

  // Macro is invariant to concept order (maps iterate sorted, and the
  // mean is order-free anyway).
  std::map<std::string, ContingencyTable> swapped;
  swapped["b"] = tables["b"];
  swapped["a"] = tables["a"];
  CHECK(micro_macro(swapped).f1_macro == r.f1_macro);

  // Micro F1 recomputation identity.
  ContingencyTable sum;
  for (const auto& [_, t] : tables) sum += t;
  CHECK(r.f1_micro == f1(sum));
}

TEST_CASE("cohen_kappa on the 0.6 table and edge cases") {
  KappaResult k = cohen_kappa({40, 10, 10, 40});
  CHECK(k.p_a == doctest::Approx(0.8));
  CHECK(k.p_e == doctest::Approx(0.5));
  CHECK(k.kappa == doctest::Approx(0.6));

  // Perfect agreement with both classes present.
  KappaResult perfect = cohen_kappa({30, 0, 0, 70});
  CHECK(perfect.kappa == 1.0);

  // Degenerate: everything in one cell still counts as agreement 1.
  CHECK(cohen_kappa({0, 0, 0, 50}).kappa == 1.0);
  CHECK(cohen_kappa({50, 0, 0, 0}).kappa == 1.0);

  CHECK_THROWS_AS(cohen_kappa({0, 0, 0, 0}), Error);
}

TEST_CASE("kappa = 1 iff FP = FN = 0") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    ContingencyTable t{static_cast<long long>(rng.below(20)),
                       static_cast<long long>(rng.below(3)),
                       static_cast<long long>(rng.below(3)),
                       static_cast<long long>(rng.below(20))};
    if (t.n() == 0) continue;
    KappaResult k = cohen_kappa(t);
    CHECK(k.kappa <= 1.0 + 1e-12);
    if (t.fp == 0 && t.fn == 0)
      CHECK(k.kappa == doctest::Approx(1.0));
    else
      CHECK(k.kappa < 1.0);
  }
}

TEST_CASE("independent raters give kappa near zero at n = 1e5") {
  Rng rng(20240901);
  ContingencyTable t;
  for (int i = 0; i < 100000; ++i) {
    bool a = rng.bernoulli(0.3);
    bool b = rng.bernoulli(0.25);
    if (a && b)
      ++t.tp;
    else if (a && !b)
      ++t.fp;
    else if (!a && b)
      ++t.fn;
    else
      ++t.tn;
  }
  CHECK(std::abs(cohen_kappa(t).kappa) < 0.05);
}

TEST_CASE("pooled kappa over documents and concepts") {
  Rng rng(6);
  AnnotatedCorpus corpus = random_corpus(rng, 4);

  // Identical annotations pool to kappa 1.
  std::vector<const Document*> docs;
  for (const auto& d : corpus.documents) docs.push_back(&d);
  const AnnotationSet& gold = corpus.annotations.at("gold");
  KappaResult self = pooled_kappa_sets(docs, gold, gold, corpus.concept_set.concepts);
  CHECK(self.kappa == 1.0);

  KappaResult cross = pooled_kappa(corpus, "gold", "second", corpus.document_ids(),
                                   corpus.concept_set.concepts);
  CHECK(cross.kappa <= 1.0);

  // Doc-by-doc tables pooled equal pooling directly (counts are additive):
  // recompute by summing per-document tables.
  ContingencyTable sum;
  for (const Document* d : docs) {
    for (const auto& concept_id : corpus.concept_set.concepts) {
      LabelSequence a =
          mentions_to_labels(*d, corpus.spans("gold", d->id, concept_id), concept_id);
      LabelSequence b =
          mentions_to_labels(*d, corpus.spans("second", d->id, concept_id), concept_id);
      sum += tunit_table(a, b);
    }
  }
  CHECK(cohen_kappa(sum).kappa == doctest::Approx(cross.kappa));
}

TEST_CASE("pooled kappa: one silent coder on a hand-built 2-doc corpus") {
  AnnotatedCorpus corpus;
  corpus.concept_set.concepts = {"c"};
  corpus.documents.push_back(make_doc("d1", {"a", "b", "c"}));
  corpus.documents.push_back(make_doc("d2", {"x", "y"}));
  corpus.annotations["gold"]["d1"]["c"] = {{0, 2}};
  corpus.annotations["gold"]["d2"]["c"] = {{2, 2}};
  corpus.annotations["silent"]["d1"]["c"] = {};
  corpus.annotations["silent"]["d2"]["c"] = {};
  corpus.validate();
  // d1 has 5 t-units (3 labelled by gold), d2 has 3 (1 labelled).
  // Pooled: TP=0 FP=0 FN=4 TN=4 -> P_A=0.5, P_E=(0)(0.5)+(1)(0.5)=0.5,
  // kappa = 0.
  KappaResult k = pooled_kappa(corpus, "silent", "gold", {"d1", "d2"}, {"c"});
  CHECK(k.p_a == doctest::Approx(0.5));
  CHECK(k.p_e == doctest::Approx(0.5));
  CHECK(k.kappa == doctest::Approx(0.0));

  // Coverage mismatch is an error.
  AnnotatedCorpus partial = corpus;
  partial.annotations["silent"].erase("d2");
  partial.validate();
  CHECK_THROWS_AS(pooled_kappa(partial, "silent", "gold", {"d1", "d2"}, {"c"}), Error);
}

TEST_CASE("every t-unit counted once per concept: cell sum = m * sum |x|") {
  Rng rng(8);
  AnnotatedCorpus corpus = random_corpus(rng, 3);
  long long total_tunits = 0;
  for (const auto& d : corpus.documents) total_tunits += static_cast<long long>(d.size());
  long long cells = 0;
  for (const auto& d : corpus.documents) {
    for (const auto& concept_id : corpus.concept_set.concepts) {
      LabelSequence a = mentions_to_labels(d, corpus.spans("gold", d.id, concept_id), concept_id);
      LabelSequence b =
          mentions_to_labels(d, corpus.spans("second", d.id, concept_id), concept_id);
      cells += tunit_table(a, b).n();
    }
  }
  CHECK(cells == static_cast<long long>(corpus.concept_set.size()) * total_tunits);
}

TEST_CASE("doc tables CSV round trip") {
  DocTables tables;
  tables.tables["d1"]["c1"] = {1, 2, 3, 4};
  tables.tables["d1"]["c2"] = {0, 0, 0, 9};
  tables.tables["d2"]["c1"] = {5, 0, 1, 2};
  tables.tables["d2"]["c2"] = {2, 2, 2, 2};
  std::ostringstream out;
  write_doc_tables_csv(tables, out, {"source=test"});
  std::istringstream in(out.str());
  DocTables back = read_doc_tables_csv(in);
  CHECK(back.tables == tables.tables);

  std::istringstream bad("doc_id,concept,tp,fp,fn,tn\nd1,c1,1,2\n");
  CHECK_THROWS_AS(read_doc_tables_csv(bad), Error);
  std::istringstream neg("doc_id,concept,tp,fp,fn,tn\nd1,c1,1,2,-3,4\n");
  CHECK_THROWS_AS(read_doc_tables_csv(neg), Error);
}

TEST_CASE("report CSV has one row per concept plus micro and macro") {
  std::map<std::string, ContingencyTable> tables;
  tables["a"] = {2, 1, 1, 6};
  tables["b"] = {0, 0, 0, 10};
  EvalReport r = micro_macro(tables);
  std::ostringstream out;
  write_report_csv(r, out, {});
  std::string text = out.str();
  CHECK(text.find("a,2,1,1,6,") != std::string::npos);
  CHECK(text.find("micro,") != std::string::npos);
  CHECK(text.find("macro,") != std::string::npos);
}
