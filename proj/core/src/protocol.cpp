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

#include "tagnoise/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tagnoise/parallel.hpp"
#include "tagnoise/rng.hpp"

namespace tagnoise {

unsigned default_jobs() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

void SweepConfig::validate() const {
  if (lambda_grid.empty()) throw Error("SweepConfig: empty lambda grid");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end()))
    throw Error("SweepConfig: lambda grid must be sorted");
  for (int v : lambda_grid)
    if (v < 0 || v > 100)
      throw Error("SweepConfig: lambda " + std::to_string(v) + " outside [0, 100]");
  if (std::adjacent_find(lambda_grid.begin(), lambda_grid.end()) != lambda_grid.end())
    throw Error("SweepConfig: duplicate lambda value");
  if (lambda_grid.front() != 0 || lambda_grid.back() != 100)
    throw Error("SweepConfig: lambda grid must contain 0 and 100");
  if (repeats < 1) throw Error("SweepConfig: repeats must be >= 1");
  if (train_docs.empty()) throw Error("SweepConfig: no training documents");
  if (test_docs.empty()) throw Error("SweepConfig: no test documents");
  crf.validate();
  perceptron.validate();
}

std::size_t corrupted_count(std::size_t n_docs, int lambda) {
  // ceil(lambda/100 * N) in exact integer arithmetic
  return (static_cast<std::size_t>(lambda) * n_docs + 99) / 100;
}

CorruptionPlan CorruptionPlan::make(const std::vector<std::string>& train_docs, int repeats,
                                    std::uint64_t master_seed) {
  CorruptionPlan plan;
  plan.permutations.reserve(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    std::vector<std::string> perm = train_docs;
    Rng rng(derive_seed(master_seed, "perm", static_cast<std::uint64_t>(r)));
    rng.shuffle(perm);
    plan.permutations.push_back(std::move(perm));
  }
  return plan;
}

std::vector<std::string> CorruptionPlan::corrupted_docs(int repeat, int lambda) const {
  const auto& perm = permutations.at(static_cast<std::size_t>(repeat));
  std::size_t k = corrupted_count(perm.size(), lambda);
  return {perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(k)};
}

AnnotationSet corrupt_training_set(const AnnotationSet& authoritative,
                                   const AnnotationSet& non_authoritative,
                                   const std::vector<std::string>& train_docs,
                                   const CorruptionPlan& plan, int repeat, int lambda) {
  std::vector<std::string> corrupted = plan.corrupted_docs(repeat, lambda);
  std::set<std::string> corrupted_set(corrupted.begin(), corrupted.end());
  AnnotationSet out;
  for (const auto& doc_id : train_docs) {
    const AnnotationSet& source = corrupted_set.count(doc_id) ? non_authoritative
                                                              : authoritative;
    auto it = source.find(doc_id);
    if (it == source.end())
      throw Error("corrupt_training_set: document '" + doc_id +
                  "' lacks annotations from the required coder");
    out[doc_id] = it->second;
  }
  return out;
}

double relative_loss(double baseline, double value) {
  if (!(baseline > 0.0)) throw Error("relative_loss: baseline must be > 0");
  return 100.0 * (value - baseline) / baseline;
}

namespace {

struct FeatureSets {
  FeatureIndex index;
  std::map<std::string, std::vector<TokenFeatureVector>> by_doc;
};

FeatureSets extract_all(const AnnotatedCorpus& corpus,
                        const std::vector<std::string>& train_docs,
                        const std::vector<std::string>& test_docs) {
  FeatureSets fs;
  for (const auto& id : train_docs) fs.by_doc[id] = extract_features(corpus.doc(id), fs.index);
  fs.index.freeze();
  for (const auto& id : test_docs) {
    if (!fs.by_doc.count(id)) fs.by_doc[id] = extract_features(corpus.doc(id), fs.index);
  }
  return fs;
}

struct CellOutcome {
  double kappa = 1.0;
  EvalReport report;
  std::optional<DocTables> doc_tables;
};

CellOutcome run_cell(const AnnotatedCorpus& corpus, const SweepConfig& config,
                     const FeatureSets& fs, const CorruptionPlan& plan,
                     const Learner& learner, int lambda, int repeat,
                     std::uint64_t cell_seed) {
  const AnnotationSet& alpha_ann = corpus.annotations.at(config.coder_alpha);
  const AnnotationSet& beta_ann = corpus.annotations.at(config.coder_beta);

  AnnotationSet corrupted = corrupt_training_set(alpha_ann, beta_ann, config.train_docs,
                                                 plan, repeat, lambda);

  std::vector<const Document*> train_ptrs, test_ptrs;
  std::vector<const std::vector<TokenFeatureVector>*> train_feats;
  for (const auto& id : config.train_docs) {
    train_ptrs.push_back(&corpus.doc(id));
    train_feats.push_back(&fs.by_doc.at(id));
  }
  for (const auto& id : config.test_docs) test_ptrs.push_back(&corpus.doc(id));

  CellOutcome out;
  out.kappa = pooled_kappa_sets(train_ptrs, alpha_ann, corrupted,
                                corpus.concept_set.concepts)
                  .kappa;

  DocTables doc_tables;
  std::map<std::string, ContingencyTable> per_concept;
  for (const auto& concept_id : corpus.concept_set.concepts) {
    std::vector<TaggedInstance> instances =
        build_instances(train_ptrs, train_feats, corrupted, concept_id);
    TaggerWeights weights =
        learner.train(instances, fs.index.size(), derive_seed(cell_seed, concept_id));

    ContingencyTable pooled;
    for (const Document* d : test_ptrs) {
      const auto& feats = fs.by_doc.at(d->id);
      IobSequence pred_tags{concept_id, viterbi_decode(weights, feats)};
      LabelSequence pred = from_iob(pred_tags, *d);
      auto ait = alpha_ann.find(d->id);
      if (ait == alpha_ann.end())
        throw Error("sweep: test document '" + d->id + "' not annotated by coder '" +
                    config.coder_alpha + "'");
      const SpanList* gold_spans = nullptr;
      auto kit = ait->second.find(concept_id);
      static const SpanList kEmpty;
      gold_spans = kit == ait->second.end() ? &kEmpty : &kit->second;
      LabelSequence gold = mentions_to_labels(*d, *gold_spans, concept_id);
      ContingencyTable t = tunit_table(pred, gold);
      pooled += t;
      if (config.keep_doc_tables) doc_tables.tables[d->id][concept_id] = t;
    }
    per_concept[concept_id] = pooled;
  }
  out.report = micro_macro(per_concept);
  if (config.keep_doc_tables) out.doc_tables = std::move(doc_tables);
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, const AnnotatedCorpus& corpus, int batch) {
  config.validate();
  for (const auto& id : config.train_docs) {
    if (!corpus.coder_covers(config.coder_alpha, id) ||
        !corpus.coder_covers(config.coder_beta, id))
      throw Error("sweep: training document '" + id + "' must be annotated by both '" +
                  config.coder_alpha + "' and '" + config.coder_beta + "'");
  }
  for (const auto& id : config.test_docs) {
    if (!corpus.coder_covers(config.coder_alpha, id))
      throw Error("sweep: test document '" + id + "' must be annotated by '" +
                  config.coder_alpha + "'");
  }

  FeatureSets fs = extract_all(corpus, config.train_docs, config.test_docs);
  CorruptionPlan plan = CorruptionPlan::make(
      config.train_docs, config.repeats,
      derive_seed(config.master_seed, "batch", static_cast<std::uint64_t>(batch)));
  std::unique_ptr<Learner> learner =
      make_learner(config.learner, config.crf, config.perceptron);

  struct Cell {
    int lambda;
    int repeat;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  std::uint64_t batch_seed =
      derive_seed(config.master_seed, "batch", static_cast<std::uint64_t>(batch));
  for (int lambda : config.lambda_grid) {
    int reps = (lambda == 0 || lambda == 100) ? 1 : config.repeats;
    for (int r = 0; r < reps; ++r)
      cells.push_back({lambda, r,
                       derive_seed(batch_seed, "cell", static_cast<std::uint64_t>(lambda),
                                   static_cast<std::uint64_t>(r))});
  }

  SweepResult result;
  result.concepts = corpus.concept_set.concepts;
  result.runs.resize(cells.size());

  parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    RunResult& row = result.runs[i];
    row.batch = batch;
    row.lambda = cell.lambda;
    row.repeat = cell.repeat;
    row.seed = cell.seed;
    try {
      CellOutcome outcome = run_cell(corpus, config, fs, plan, *learner, cell.lambda,
                                     cell.repeat, cell.seed);
      row.kappa = outcome.kappa;
      row.report = std::move(outcome.report);
      row.doc_tables = std::move(outcome.doc_tables);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  });

  for (int lambda : config.lambda_grid) {
    LambdaStats st;
    st.batch = batch;
    st.lambda = lambda;
    std::vector<double> kappa, f1u, f1m, pu, ru, pm, rm;
    for (const RunResult& row : result.runs) {
      if (row.lambda != lambda) continue;
      if (row.failed) {
        ++st.failed;
        continue;
      }
      ++st.runs;
      kappa.push_back(row.kappa);
      f1u.push_back(row.report.f1_micro);
      f1m.push_back(row.report.f1_macro);
      pu.push_back(row.report.precision_micro);
      ru.push_back(row.report.recall_micro);
      pm.push_back(row.report.precision_macro);
      rm.push_back(row.report.recall_macro);
    }
    st.kappa_mean = mean_of(kappa);
    st.kappa_std = sample_std(kappa);
    st.f1_micro_mean = mean_of(f1u);
    st.f1_micro_std = sample_std(f1u);
    st.f1_macro_mean = mean_of(f1m);
    st.f1_macro_std = sample_std(f1m);
    st.precision_micro_mean = mean_of(pu);
    st.precision_micro_std = sample_std(pu);
    st.recall_micro_mean = mean_of(ru);
    st.recall_micro_std = sample_std(ru);
    st.precision_macro_mean = mean_of(pm);
    st.precision_macro_std = sample_std(pm);
    st.recall_macro_mean = mean_of(rm);
    st.recall_macro_std = sample_std(rm);
    result.stats.push_back(st);
  }
  return result;
}

std::vector<std::vector<std::string>> kfold_partition(std::vector<std::string> doc_ids,
                                                      int k, std::uint64_t seed) {
  if (k < 2) throw Error("kfold_cv: k must be >= 2");
  if (static_cast<std::size_t>(k) > doc_ids.size())
    throw Error("kfold_cv: k = " + std::to_string(k) + " exceeds document count " +
                std::to_string(doc_ids.size()));
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(doc_ids);
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < doc_ids.size(); ++i)
    folds[i % static_cast<std::size_t>(k)].push_back(doc_ids[i]);
  return folds;
}

EvalReport kfold_cv(const AnnotatedCorpus& corpus, const std::string& coder, int k,
                    const Learner& learner, std::uint64_t seed, unsigned jobs) {
  auto ait = corpus.annotations.find(coder);
  if (ait == corpus.annotations.end()) throw Error("kfold_cv: unknown coder '" + coder + "'");
  std::vector<std::string> docs;
  for (const auto& [doc_id, _] : ait->second) docs.push_back(doc_id);
  std::vector<std::vector<std::string>> folds = kfold_partition(std::move(docs), k, seed);

  const AnnotationSet& ann = ait->second;
  std::vector<std::map<std::string, ContingencyTable>> fold_tables(
      static_cast<std::size_t>(k));

  parallel_for(static_cast<std::size_t>(k), jobs, [&](std::size_t f) {
    std::vector<std::string> train_ids;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) train_ids.insert(train_ids.end(), folds[g].begin(), folds[g].end());

    FeatureIndex index;
    std::map<std::string, std::vector<TokenFeatureVector>> feats;
    for (const auto& id : train_ids) feats[id] = extract_features(corpus.doc(id), index);
    index.freeze();
    for (const auto& id : folds[f]) feats[id] = extract_features(corpus.doc(id), index);

    std::vector<const Document*> train_ptrs;
    std::vector<const std::vector<TokenFeatureVector>*> train_feats;
    for (const auto& id : train_ids) {
      train_ptrs.push_back(&corpus.doc(id));
      train_feats.push_back(&feats.at(id));
    }

    std::uint64_t fold_seed = derive_seed(seed, "fold", f);
    std::map<std::string, ContingencyTable>& tables = fold_tables[f];
    for (const auto& concept_id : corpus.concept_set.concepts) {
      std::vector<TaggedInstance> instances =
          build_instances(train_ptrs, train_feats, ann, concept_id);
      TaggerWeights weights =
          learner.train(instances, index.size(), derive_seed(fold_seed, concept_id));
      for (const auto& id : folds[f]) {
        const Document& d = corpus.doc(id);
        IobSequence pred_tags{concept_id, viterbi_decode(weights, feats.at(id))};
        LabelSequence pred = from_iob(pred_tags, d);
        LabelSequence gold = mentions_to_labels(
            d, corpus.spans(coder, id, concept_id), concept_id);
        tables[concept_id] += tunit_table(pred, gold);
      }
    }
  });

  std::map<std::string, ContingencyTable> pooled;
  for (const auto& ft : fold_tables)
    for (const auto& [concept_id, t] : ft) pooled[concept_id] += t;
  for (const auto& concept_id : corpus.concept_set.concepts) pooled[concept_id];
  return micro_macro(pooled);
}

void write_sweep_csv(const SweepResult& result, std::ostream& out,
                     const std::vector<std::string>& meta_lines) {
  for (const auto& m : meta_lines) out << "# " << m << '\n';
  out << "batch,lambda,repeat,seed,kappa,f1_micro,f1_macro,precision_micro,recall_micro,"
         "precision_macro,recall_macro";
  for (const auto& c : result.concepts) out << ",f1_" << c;
  out << ",status\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out << buf;
  };
  for (const RunResult& row : result.runs) {
    out << row.batch << ',' << row.lambda << ',' << row.repeat << ',' << row.seed << ',';
    if (row.failed) {
      for (int i = 0; i < 7; ++i) out << "nan,";
      for (std::size_t i = 0; i < result.concepts.size(); ++i) out << "nan,";
      std::string msg = row.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      out << "failed:" << msg << '\n';
      continue;
    }
    num(row.kappa);
    out << ',';
    num(row.report.f1_micro);
    out << ',';
    num(row.report.f1_macro);
    out << ',';
    num(row.report.precision_micro);
    out << ',';
    num(row.report.recall_micro);
    out << ',';
    num(row.report.precision_macro);
    out << ',';
    num(row.report.recall_macro);
    for (const auto& c : result.concepts) {
      out << ',';
      num(row.report.f1_per_concept.at(c));
    }
    out << ",ok\n";
  }
}

std::string sweep_summary_json(const SweepResult& result,
                               const std::map<std::string, std::string>& config_echo) {
  nlohmann::json j;
  for (const auto& [k, v] : config_echo) j["config"][k] = v;
  j["concepts"] = result.concepts;

  std::set<int> batches;
  for (const auto& st : result.stats) batches.insert(st.batch);
  for (int b : batches) {
    // Loss percentages are relative to this batch's lambda = 0 means,
    // computed from the full-precision stored metrics.
    double base_micro = 0.0, base_macro = 0.0;
    for (const auto& st : result.stats)
      if (st.batch == b && st.lambda == 0) {
        base_micro = st.f1_micro_mean;
        base_macro = st.f1_macro_mean;
      }
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& st : result.stats) {
      if (st.batch != b) continue;
      nlohmann::json row = {{"lambda", st.lambda},
                            {"runs", st.runs},
                            {"failed", st.failed},
                            {"kappa_mean", st.kappa_mean},
                            {"kappa_std", st.kappa_std},
                            {"f1_micro_mean", st.f1_micro_mean},
                            {"f1_micro_std", st.f1_micro_std},
                            {"f1_macro_mean", st.f1_macro_mean},
                            {"f1_macro_std", st.f1_macro_std},
                            {"precision_micro_mean", st.precision_micro_mean},
                            {"precision_micro_std", st.precision_micro_std},
                            {"recall_micro_mean", st.recall_micro_mean},
                            {"recall_micro_std", st.recall_micro_std},
                            {"precision_macro_mean", st.precision_macro_mean},
                            {"precision_macro_std", st.precision_macro_std},
                            {"recall_macro_mean", st.recall_macro_mean},
                            {"recall_macro_std", st.recall_macro_std}};
      if (base_micro > 0.0)
        row["f1_micro_loss_pct"] = relative_loss(base_micro, st.f1_micro_mean);
      if (base_macro > 0.0)
        row["f1_macro_loss_pct"] = relative_loss(base_macro, st.f1_macro_mean);
      arr.push_back(std::move(row));
    }
    j["batches"][std::to_string(b)] = std::move(arr);
  }

  if (batches.size() > 1) {
    nlohmann::json avg = nlohmann::json::array();
    std::set<int> lambdas;
    for (const auto& st : result.stats) lambdas.insert(st.lambda);
    for (int lambda : lambdas) {
      double kappa = 0, f1u = 0, f1m = 0;
      int n = 0;
      for (const auto& st : result.stats) {
        if (st.lambda != lambda) continue;
        kappa += st.kappa_mean;
        f1u += st.f1_micro_mean;
        f1m += st.f1_macro_mean;
        ++n;
      }
      if (n == 0) continue;
      avg.push_back({{"lambda", lambda},
                     {"kappa_mean", kappa / n},
                     {"f1_micro_mean", f1u / n},
                     {"f1_macro_mean", f1m / n}});
    }
    j["batch_average"] = std::move(avg);
  }
  return j.dump(2);
}

}  // namespace tagnoise
