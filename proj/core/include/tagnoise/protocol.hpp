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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tagnoise/corpus.hpp"
#include "tagnoise/crf.hpp"
#include "tagnoise/eval.hpp"
#include "tagnoise/learner.hpp"
#include "tagnoise/perceptron.hpp"

namespace tagnoise {

/// Corruption-ratio sweep configuration. The training documents must be
/// annotated by both coders; test documents by the authoritative coder.
struct SweepConfig {
  std::vector<int> lambda_grid = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int repeats = 10;                  ///< per interior lambda; 0 and 100 run once
  std::uint64_t master_seed = 1;
  std::string learner = "crf";
  TrainConfig crf;
  PerceptronConfig perceptron;
  std::vector<std::string> train_docs;
  std::vector<std::string> test_docs;
  std::string coder_alpha = "gold";  ///< authoritative: test-set gold standard
  std::string coder_beta = "noisy";  ///< non-authoritative: corrupts training data
  unsigned jobs = 1;
  bool keep_doc_tables = false;      ///< retain per-document tables per run

  void validate() const;
};

/// One (lambda, repeat) cell of a sweep.
struct RunResult {
  int batch = 1;
  int lambda = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double kappa = 1.0;       ///< agreement between clean and corrupted training set
  EvalReport report;        ///< test-set evaluation against the authoritative coder
  std::optional<DocTables> doc_tables;
};

/// Per-lambda aggregate over repeats (means and sample standard deviations
/// over the successful runs).
struct LambdaStats {
  int batch = 1;
  int lambda = 0;
  int runs = 0;
  int failed = 0;
  double kappa_mean = 0.0, kappa_std = 0.0;
  double f1_micro_mean = 0.0, f1_micro_std = 0.0;
  double f1_macro_mean = 0.0, f1_macro_std = 0.0;
  double precision_micro_mean = 0.0, precision_micro_std = 0.0;
  double recall_micro_mean = 0.0, recall_micro_std = 0.0;
  double precision_macro_mean = 0.0, precision_macro_std = 0.0;
  double recall_macro_mean = 0.0, recall_macro_std = 0.0;
};

struct SweepResult {
  std::vector<RunResult> runs;         ///< ordered by (batch, lambda, repeat)
  std::vector<LambdaStats> stats;      ///< per batch then lambda
  std::vector<std::string> concepts;
};

/// One permutation of the training documents per repeat; the corrupted set
/// for (repeat, lambda) is the first ceil(lambda/100 * N) entries, so the
/// sets are nested in lambda within a repeat.
struct CorruptionPlan {
  std::vector<std::vector<std::string>> permutations;  ///< [repeat][position]

  static CorruptionPlan make(const std::vector<std::string>& train_docs, int repeats,
                             std::uint64_t master_seed);
  std::vector<std::string> corrupted_docs(int repeat, int lambda) const;
};

/// Number of corrupted documents at a given ratio: ceil(lambda/100 * N).
std::size_t corrupted_count(std::size_t n_docs, int lambda);

/// Replaces the authoritative annotations of the planned documents with the
/// non-authoritative ones; document texts are untouched.
AnnotationSet corrupt_training_set(const AnnotationSet& authoritative,
                                   const AnnotationSet& non_authoritative,
                                   const std::vector<std::string>& train_docs,
                                   const CorruptionPlan& plan, int repeat, int lambda);

/// Runs the full corruption-ratio sweep for one coder-role assignment.
/// Fully reproducible from the master seed; failed cells are recorded and
/// skipped by the aggregates.
SweepResult run_sweep(const SweepConfig& config, const AnnotatedCorpus& corpus,
                      int batch = 1);

/// Percent change of a metric against the lambda = 0 baseline.
double relative_loss(double baseline, double value);

/// Seeded shuffle followed by round-robin assignment: fold sizes differ by
/// at most 1 and every document lands in exactly one fold.
std::vector<std::vector<std::string>> kfold_partition(std::vector<std::string> doc_ids,
                                                      int k, std::uint64_t seed);

/// Seeded k-fold cross-validation of one coder's annotations. Folds are
/// near-equal (sizes differ by at most 1); the report pools the per-fold
/// test tables over all documents.
EvalReport kfold_cv(const AnnotatedCorpus& corpus, const std::string& coder, int k,
                    const Learner& learner, std::uint64_t seed, unsigned jobs = 1);

/// Sweep CSV: one row per run with per-concept F1 columns appended.
void write_sweep_csv(const SweepResult& result, std::ostream& out,
                     const std::vector<std::string>& meta_lines);
/// JSON summary with per-lambda means and standard deviations.
std::string sweep_summary_json(const SweepResult& result,
                               const std::map<std::string, std::string>& config_echo);

}  // namespace tagnoise
