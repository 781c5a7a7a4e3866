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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. argv[1] must point at the CLI binary, which
// the pipeline-determinism criterion drives through the shell.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tagnoise/corpus.hpp"
#include "tagnoise/crf.hpp"
#include "tagnoise/eval.hpp"
#include "tagnoise/learner.hpp"
#include "tagnoise/parallel.hpp"
#include "tagnoise/protocol.hpp"
#include "tagnoise/rng.hpp"
#include "tagnoise/significance.hpp"
#include "tagnoise/simcorpus.hpp"
#include "test_helpers.hpp"

namespace {

using namespace tagnoise;
using namespace tagnoise::test;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1. numerical core: gradient vs finite differences; logZ and Viterbi vs
//    brute-force enumeration
// ---------------------------------------------------------------------------

void criterion_numerical_core() {
  auto t0 = Clock::now();
  Rng rng(10001);

  double worst_grad = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n_features = 4 + rng.below(17);  // <= 20
    std::vector<TaggedInstance> data;
    std::size_t len = 1 + rng.below(6);
    RandomModel m = random_model(rng, len, n_features, 0.5);
    TaggedInstance inst;
    inst.features = m.features;
    inst.gold.assign(len, IobTag::O);
    for (std::size_t t = 0; t < len; ++t)
      if (rng.bernoulli(0.4))
        inst.gold[t] = (t > 0 && inst.gold[t - 1] != IobTag::O && rng.bernoulli(0.5))
                           ? IobTag::I
                           : IobTag::B;
    data.push_back(inst);

    TaggerWeights w = random_model(rng, 1, n_features, 0.5).weights;
    std::vector<double> grad;
    nll_gradient(w, data, 3.0, grad);
    const double h = 1e-5;
    for (std::size_t k = 0; k < grad.size(); ++k) {
      auto bump = [&](double d) {
        TaggerWeights wb = w;
        if (k < w.emission.size())
          wb.emission[k] += d;
        else
          wb.transition[k - w.emission.size()] += d;
        return nll_value(wb, data, 3.0);
      };
      double fd = (bump(h) - bump(-h)) / (2.0 * h);
      worst_grad = std::max(worst_grad, rel_err(fd, grad[k]));
    }
  }

  double worst_logz = 0.0;
  int viterbi_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t len = 1 + rng.below(8);
    RandomModel m = random_model(rng, len, 6);
    CrfMarginals fb = forward_backward(m.weights, m.features);
    worst_logz = std::max(worst_logz, rel_err(fb.log_z, brute_force_log_z(m.weights, m.features)));
    if (viterbi_decode(m.weights, m.features) != brute_force_viterbi(m.weights, m.features))
      ++viterbi_mismatch;
  }

  double elapsed = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "gradient-vs-FD max rel err %.2e (<1e-4), logZ max rel err %.2e (<1e-8), "
                "viterbi mismatches %d/200, %.1fs (<60s)",
                worst_grad, worst_logz, viterbi_mismatch, elapsed);
  report("A1 numerical-core", worst_grad < 1e-4 && worst_logz < 1e-8 &&
                                  viterbi_mismatch == 0 && elapsed < 60.0,
         buf);
}

// ---------------------------------------------------------------------------
// 2. metric oracles
// ---------------------------------------------------------------------------

void criterion_metric_oracles() {
  bool ok = true;
  std::ostringstream why;

  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      ok = false;
      why << what << "; ";
    }
  };

  expect(f1({0, 0, 0, 7}) == 1.0, "empty-table F1 != 1");
  expect(std::abs(f1({2, 1, 1, 0}) - 2.0 / 3.0) < 1e-12, "F1(2,1,1) != 2/3");
  expect(f1({0, 5, 0, 1}) == 0.0, "F1 with TP=0,FP>0 != 0");

  KappaResult k6 = cohen_kappa({40, 10, 10, 40});
  expect(std::abs(k6.p_a - 0.8) < 1e-12 && std::abs(k6.p_e - 0.5) < 1e-12 &&
             std::abs(k6.kappa - 0.6) < 1e-12,
         "kappa(40,10,10,40) != 0.6");
  expect(cohen_kappa({30, 0, 0, 70}).kappa == 1.0, "perfect-agreement kappa != 1");

  std::map<std::string, ContingencyTable> tables;
  tables["a"] = {100, 0, 0, 0};
  tables["b"] = {0, 50, 50, 0};
  EvalReport r = micro_macro(tables);
  expect(std::abs(r.f1_macro - 0.5) < 1e-12, "macro != 0.5");
  expect(std::abs(r.f1_micro - 200.0 / 300.0) < 1e-12, "micro != 2/3");

  Rng rng(20002);
  ContingencyTable ind;
  for (int i = 0; i < 100000; ++i) {
    bool a = rng.bernoulli(0.3), b = rng.bernoulli(0.25);
    if (a && b)
      ++ind.tp;
    else if (a)
      ++ind.fp;
    else if (b)
      ++ind.fn;
    else
      ++ind.tn;
  }
  double kz = cohen_kappa(ind).kappa;
  expect(std::abs(kz) < 0.05, "independent raters |kappa| >= 0.05");

  char buf[128];
  std::snprintf(buf, sizeof(buf), "fixed table suite ok, independent-rater kappa %.4f", kz);
  report("A2 metric-oracles", ok, ok ? buf : why.str());
}

// ---------------------------------------------------------------------------
// 3. codec round trips
// ---------------------------------------------------------------------------

void criterion_codec() {
  bool ok = true;
  std::ostringstream why;

  long exhaustive = 0;
  for (std::size_t n_tokens = 1; n_tokens <= 6 && ok; ++n_tokens) {
    std::vector<std::string> words(n_tokens, "w");
    Document d = make_doc("d", words);
    for (const auto& tags : all_sequences(n_tokens)) {
      if (!iob_valid(tags)) continue;
      IobSequence iob{"c", tags};
      LabelSequence labels = from_iob(iob, d);
      SpanList spans = labels_to_mentions(labels, d);
      if (to_iob(labels, d).tags != tags ||
          mentions_to_labels(d, spans, "c") != labels) {
        ok = false;
        why << "exhaustive round trip failed at " << n_tokens << " tokens";
        break;
      }
      ++exhaustive;
    }
  }

  Rng rng(30003);
  int corpora = 0;
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    AnnotatedCorpus corpus = random_corpus(rng, 1 + static_cast<int>(rng.below(2)));
    std::ostringstream out;
    serialize_corpus(corpus, out);
    std::istringstream in(out.str());
    AnnotatedCorpus back = parse_corpus(in);
    if (!(back.documents == corpus.documents && back.annotations == corpus.annotations)) {
      ok = false;
      why << "corpus round trip failed at trial " << trial;
      break;
    }
    // span -> label -> span and label -> IOB -> label on every annotation
    for (const auto& [coder, per_doc] : corpus.annotations) {
      for (const auto& [doc_id, per_concept] : per_doc) {
        const Document& d = corpus.doc(doc_id);
        for (const auto& [c, spans] : per_concept) {
          LabelSequence labels = mentions_to_labels(d, spans, c);
          if (labels_to_mentions(labels, d) != spans ||
              from_iob(to_iob(labels, d), d) != labels) {
            ok = false;
            why << "annotation round trip failed in " << doc_id;
            break;
          }
        }
      }
    }
    ++corpora;
  }

  char buf[128];
  std::snprintf(buf, sizeof(buf), "%ld exhaustive sequences, %d random corpora", exhaustive,
                corpora);
  report("A3 codec-round-trips", ok, ok ? buf : why.str());
}

// ---------------------------------------------------------------------------
// 4. protocol invariants on the full default synthetic sweep
// ---------------------------------------------------------------------------

void criterion_protocol(const SweepResult& merged, double sweep_seconds) {
  bool ok = true;
  std::ostringstream why;

  for (const RunResult& row : merged.runs) {
    if (row.failed) {
      ok = false;
      why << "failed cell batch " << row.batch << " lambda " << row.lambda << ": "
          << row.error << "; ";
    }
    if (row.lambda == 0 && row.kappa != 1.0) {
      ok = false;
      why << "kappa(0) != 1 exactly; ";
    }
  }

  // kappa non-increasing in lambda within each (batch, repeat), with the
  // deterministic endpoints shared by all repeats.
  std::map<int, std::map<int, std::map<int, double>>> kappa_by;  // batch->lambda->repeat
  for (const RunResult& row : merged.runs)
    if (!row.failed) kappa_by[row.batch][row.lambda][row.repeat] = row.kappa;
  for (auto& [batch, by_lambda] : kappa_by) {
    std::vector<int> lambdas;
    for (auto& [l, _] : by_lambda) lambdas.push_back(l);
    int max_repeat = 0;
    for (auto& [l, by_rep] : by_lambda)
      for (auto& [r, _] : by_rep) max_repeat = std::max(max_repeat, r);
    for (int rep = 0; rep <= max_repeat; ++rep) {
      double prev = 2.0;
      for (int l : lambdas) {
        auto& by_rep = by_lambda[l];
        auto it = by_rep.count(rep) ? by_rep.find(rep) : by_rep.find(0);
        if (it == by_rep.end()) continue;
        if (it->second > prev + 1e-12) {
          ok = false;
          why << "kappa increased at batch " << batch << " lambda " << l << " repeat "
              << rep << "; ";
        }
        prev = it->second;
      }
    }
  }

  // Nesting of corrupted document sets, checked on a same-shape plan.
  {
    std::vector<std::string> docs;
    for (int i = 0; i < 120; ++i) docs.push_back("d" + std::to_string(i));
    CorruptionPlan plan = CorruptionPlan::make(docs, 10, 4242);
    for (int r = 0; r < 10 && ok; ++r) {
      for (int l1 = 0; l1 <= 100; l1 += 10) {
        auto small = plan.corrupted_docs(r, l1);
        for (int l2 = l1 + 10; l2 <= 100; l2 += 10) {
          auto large = plan.corrupted_docs(r, l2);
          std::set<std::string> big(large.begin(), large.end());
          for (const auto& id : small)
            if (!big.count(id)) {
              ok = false;
              why << "nesting violated at repeat " << r << " lambda " << l1 << "->" << l2
                  << "; ";
            }
        }
      }
    }
  }

  if (sweep_seconds > 900.0) {
    ok = false;
    why << "default sweep took " << sweep_seconds << "s (> 900); ";
  }

  // Learnability: on the default cue-keyed corpus, gold-trained models must
  // reach micro F1 >= 0.9 against gold test annotations (the lambda = 0 rows).
  double min_base_f1 = 1.0;
  for (const RunResult& row : merged.runs)
    if (!row.failed && row.lambda == 0)
      min_base_f1 = std::min(min_base_f1, row.report.f1_micro);
  if (min_base_f1 < 0.9) {
    ok = false;
    why << "lambda-0 micro F1 " << min_base_f1 << " below 0.9; ";
  }

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%zu runs, kappa(0)=1 exact, nesting + monotone kappa hold, base F1 "
                "%.3f (>=0.9), sweep %.0fs (<=900s)",
                merged.runs.size(), min_base_f1, sweep_seconds);
  report("A4 protocol-invariants", ok, ok ? buf : why.str());
}

// Reduced sweep determinism: same master seed (and any job count) gives
// byte-identical results.
void criterion_protocol_determinism() {
  GenConfig cfg;
  cfg.documents = 30;
  cfg.concepts = 3;
  cfg.tokens_min = 30;
  cfg.tokens_max = 45;
  cfg.mention_rate = 0.7;
  cfg.mention_len_mean = 4.0;
  cfg.seed = 777;
  AnnotatedCorpus corpus = generate_corpus(cfg);
  CoderProfile p;
  p.mention_drop_prob = 0.2;
  p.boundary_extend_mean = 1.0;
  p.boundary_extend_sd = 0.5;
  corpus.annotations["noisy"] = apply_coder(corpus, "gold", p, 11);

  SweepConfig config;
  config.lambda_grid = {0, 30, 70, 100};
  config.repeats = 2;
  config.master_seed = 31337;
  auto ids = corpus.document_ids();
  config.train_docs.assign(ids.begin(), ids.begin() + 20);
  config.test_docs.assign(ids.begin() + 20, ids.end());

  auto csv_of = [&](unsigned jobs) {
    SweepConfig c = config;
    c.jobs = jobs;
    SweepResult res = run_sweep(c, corpus);
    std::ostringstream out;
    write_sweep_csv(res, out, {});
    return out.str();
  };
  std::string a = csv_of(1);
  std::string b = csv_of(1);
  std::string c = csv_of(4);
  bool ok = (a == b) && (a == c) && !a.empty();
  report("A4b sweep-determinism", ok,
         ok ? "identical bytes across reruns and across 1 vs 4 jobs"
            : "sweep output differs across reruns or job counts");
}

// ---------------------------------------------------------------------------
// 5 + 6. qualitative over/under-annotation replication and ART significance
// ---------------------------------------------------------------------------

struct Replication {
  double drop_over = 0.0;
  double drop_under = 0.0;
  double recall_delta_over = 0.0;
  double art_p_under = 1.0;
  double kappa_over = 0.0;
  double kappa_under = 0.0;
  bool usable = false;
};

Replication run_replication(int i) {
  Replication rep;
  GenConfig cfg;
  cfg.documents = 120;
  cfg.concepts = 9;
  cfg.tokens_min = 80;
  cfg.tokens_max = 110;
  cfg.mention_rate = 0.6;
  cfg.mention_len_mean = 6.0;
  cfg.seed = 5000 + static_cast<std::uint64_t>(i);
  AnnotatedCorpus corpus = generate_corpus(cfg);

  // A pure overannotator: never removes gold mentions, only widens and adds.
  CoderProfile over;
  over.mention_drop_prob = 0.0;
  over.spurious_mention_rate = 0.05;
  over.boundary_extend_mean = 2.0;
  over.boundary_extend_sd = 0.8;
  over.mention_rate_multiplier = 1.157;

  CoderProfile under;
  under.mention_drop_prob = 0.25;
  under.spurious_mention_rate = 0.02;
  under.boundary_extend_mean = -2.0;
  under.boundary_extend_sd = 0.8;
  under.mention_rate_multiplier = 0.864;

  std::uint64_t coder_seed = derive_seed(cfg.seed, "acceptance-coders");
  CalibrationResult cal_over =
      calibrate_to_kappa(corpus, "gold", over, 0.74, 0.02, coder_seed);
  CalibrationResult cal_under =
      calibrate_to_kappa(corpus, "gold", under, 0.74, 0.02, derive_seed(coder_seed, "u"));
  rep.kappa_over = cal_over.achieved_kappa;
  rep.kappa_under = cal_under.achieved_kappa;

  AnnotatedCorpus with_over = corpus;
  with_over.annotations["noisy"] =
      apply_coder(corpus, "gold", cal_over.profile, coder_seed);
  AnnotatedCorpus with_under = corpus;
  with_under.annotations["noisy"] =
      apply_coder(corpus, "gold", cal_under.profile, derive_seed(coder_seed, "u"));

  SweepConfig config;
  config.lambda_grid = {0, 100};
  config.repeats = 1;
  config.master_seed = derive_seed(cfg.seed, "acceptance-sweep");
  config.keep_doc_tables = true;
  auto ids = corpus.document_ids();
  config.train_docs.assign(ids.begin(), ids.begin() + 60);
  config.test_docs.assign(ids.begin() + 60, ids.end());

  SweepResult res_over = run_sweep(config, with_over);
  SweepResult res_under = run_sweep(config, with_under);
  if (res_over.runs.size() != 2 || res_under.runs.size() != 2) return rep;
  for (const auto& r : res_over.runs)
    if (r.failed) return rep;
  for (const auto& r : res_under.runs)
    if (r.failed) return rep;

  const EvalReport& over0 = res_over.runs[0].report;
  const EvalReport& over100 = res_over.runs[1].report;
  const EvalReport& under0 = res_under.runs[0].report;
  const EvalReport& under100 = res_under.runs[1].report;

  rep.drop_over = over0.f1_micro - over100.f1_micro;
  rep.drop_under = under0.f1_micro - under100.f1_micro;
  rep.recall_delta_over = over100.recall_micro - over0.recall_micro;

  ArtInput art;
  art.system_a = *res_under.runs[0].doc_tables;
  art.system_b = *res_under.runs[1].doc_tables;
  art.shuffles = 1999;
  art.seed = derive_seed(cfg.seed, "acceptance-art");
  rep.art_p_under = art_test(art, ArtMetric::Micro).p_value;
  rep.usable = true;
  return rep;
}

void criteria_quality_and_significance() {
  int n_drop_ok = 0, n_recall_ok = 0, n_art_ok = 0, usable = 0;
  std::ostringstream detail;
  for (int i = 1; i <= 10; ++i) {
    Replication rep = run_replication(i);
    if (!rep.usable) {
      detail << "rep " << i << " unusable; ";
      continue;
    }
    ++usable;
    if (rep.drop_under > rep.drop_over) ++n_drop_ok;
    if (rep.recall_delta_over >= -0.02) ++n_recall_ok;
    if (rep.art_p_under < 0.05) ++n_art_ok;
    detail << "rep" << i << "(dO=" << std::round(rep.drop_over * 1000) / 1000
           << ",dU=" << std::round(rep.drop_under * 1000) / 1000
           << ",dR=" << std::round(rep.recall_delta_over * 1000) / 1000
           << ",p=" << rep.art_p_under << ") ";
  }

  {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "under-drop > over-drop in %d/10, over-coder recall within noise in "
                  "%d/10 (need >= 8)",
                  n_drop_ok, n_recall_ok);
    bool pass = usable == 10 && n_drop_ok >= 8 && n_recall_ok >= 8;
    report("A5 over/under-annotation", pass, std::string(buf) + " | " + detail.str());
  }

  // A6: ART behaviour (self-test, extreme separation, under 0-vs-100).
  bool art_ok = true;
  std::ostringstream art_why;

  {
    DocTables self;
    Rng rng(60606);
    for (int d = 0; d < 40; ++d)
      for (int c = 0; c < 3; ++c)
        self.tables["d" + std::to_string(d)]["c" + std::to_string(c)] = {
            static_cast<long long>(rng.below(12)), static_cast<long long>(rng.below(4)),
            static_cast<long long>(rng.below(4)), 30};
    ArtInput input;
    input.system_a = self;
    input.system_b = self;
    input.shuffles = 999;
    input.seed = 8;
    double p_self = art_test(input, ArtMetric::Micro).p_value;
    if (!(p_self > 0.9)) {
      art_ok = false;
      art_why << "self-test p = " << p_self << " (need > 0.9); ";
    }

    DocTables perfect, broken;
    for (int d = 0; d < 50; ++d) {
      perfect.tables["d" + std::to_string(d)]["c"] = {10, 0, 0, 30};
      broken.tables["d" + std::to_string(d)]["c"] = {0, 10, 10, 20};
    }
    ArtInput extreme;
    extreme.system_a = perfect;
    extreme.system_b = broken;
    extreme.shuffles = 9999;
    extreme.seed = 9;
    double p_ext = art_test(extreme, ArtMetric::Micro).p_value;
    if (!(p_ext < 0.01)) {
      art_ok = false;
      art_why << "extreme-separation p = " << p_ext << " (need < 0.01); ";
    }

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "self p>0.9, extreme p<0.01, under-coder 0-vs-100 significant in %d/10 "
                  "(need >= 8)",
                  n_art_ok);
    bool pass = art_ok && n_art_ok >= 8;
    report("A6 significance", pass, pass ? buf : (art_why.str() + buf));
  }
}

// ---------------------------------------------------------------------------
// 7. 20-fold cross-validation self-consistency
// ---------------------------------------------------------------------------

void criterion_kfold() {
  int wins = 0;
  std::ostringstream detail;
  for (int i = 1; i <= 10; ++i) {
    GenConfig cfg;
    cfg.documents = 40;
    cfg.concepts = 4;
    cfg.tokens_min = 50;
    cfg.tokens_max = 70;
    cfg.mention_rate = 0.5;
    cfg.mention_len_mean = 4.0;
    cfg.seed = 7000 + static_cast<std::uint64_t>(i);
    AnnotatedCorpus corpus = generate_corpus(cfg);

    CoderProfile jitter;
    jitter.mention_drop_prob = 0.1;
    jitter.spurious_mention_rate = 0.1;
    jitter.boundary_extend_mean = 0.0;
    jitter.boundary_extend_sd = 2.0;
    corpus.annotations["jitter"] =
        apply_coder(corpus, "gold", jitter, derive_seed(cfg.seed, "jitter"));

    CrfLearner learner;
    std::uint64_t seed = derive_seed(cfg.seed, "kfold-acceptance");
    EvalReport self_consistent = kfold_cv(corpus, "gold", 20, learner, seed);
    EvalReport degraded = kfold_cv(corpus, "jitter", 20, learner, seed);
    if (self_consistent.f1_micro > degraded.f1_micro) ++wins;
    detail << "rep" << i << "(" << std::round(self_consistent.f1_micro * 1000) / 1000
           << " vs " << std::round(degraded.f1_micro * 1000) / 1000 << ") ";
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf),
                "k=20: self-consistent coder wins %d/10 (need >= 8)", wins);
  report("A7 kfold-self-consistency", wins >= 8, std::string(buf) + " | " + detail.str());
}

// ---------------------------------------------------------------------------
// 8. CLI pipeline determinism (gen -> sweep -> art), bytes compared across
//    reruns and job counts
// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_cli_determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "tagnoise_acceptance";
  std::error_code ec;
  fs::remove_all(base, ec);
  fs::path work = base / "work";  // one fixed path, so embedded configs match

  // Runs the whole pipeline in `work`, then snapshots the outputs.
  auto run_pipeline = [&](const std::string& tag, int jobs) -> fs::path {
    fs::remove_all(work, ec);
    fs::create_directories(work);
    std::string corpus = (work / "corpus.jsonl").string();
    std::string log = (work / "log.txt").string();
    std::ostringstream cmd;
    cmd << cli << " gen --out " << corpus
        << " --docs 40 --concepts 3 --tokens-min 40 --tokens-max 60"
        << " --mention-rate 0.6 --mention-len-mean 4 --seed 321 >> " << log << " 2>&1 && "
        << cli << " sweep --in " << corpus << " --lambda-grid 0,50,100 --repeats 2"
        << " --seed 99 --train-frac 0.5 --jobs " << jobs << " --out-csv "
        << (work / "sweep.csv").string() << " --out-json " << (work / "sweep.json").string()
        << " --emit-tables " << work.string() << " >> " << log << " 2>&1 && " << cli
        << " art --a " << (work / "tables_batch1_lambda0.csv").string() << " --b "
        << (work / "tables_batch1_lambda100.csv").string()
        << " --metric micro --shuffles 999 --seed 5 --out " << (work / "art.json").string()
        << " >> " << log << " 2>&1";
    int rc = std::system(cmd.str().c_str());
    if (rc != 0) {
      std::printf("  pipeline %s exited with %d; log:\n%s\n", tag.c_str(), rc,
                  slurp(work / "log.txt").c_str());
    }
    fs::path snap = base / tag;
    fs::create_directories(snap);
    for (const auto& entry : fs::directory_iterator(work))
      fs::copy_file(entry.path(), snap / entry.path().filename(),
                    fs::copy_options::overwrite_existing, ec);
    return snap;
  };

  fs::path r1 = run_pipeline("run1", 1);
  fs::path r2 = run_pipeline("run2", 1);
  fs::path r3 = run_pipeline("run3", 3);

  const char* files[] = {"corpus.jsonl",
                         "corpus.jsonl.meta.json",
                         "sweep.csv",
                         "sweep.json",
                         "tables_batch1_lambda0.csv",
                         "tables_batch1_lambda100.csv",
                         "art.json"};
  bool ok = true;
  std::ostringstream why;
  for (const char* f : files) {
    std::string a = slurp(r1 / f), b = slurp(r2 / f), c = slurp(r3 / f);
    if (a.empty()) {
      ok = false;
      why << f << " missing/empty; ";
      continue;
    }
    if (a != b) {
      ok = false;
      why << f << " differs across reruns; ";
    }
    if (a != c) {
      ok = false;
      why << f << " differs across job counts; ";
    }
  }

  // Grid {0,50,100} with 2 repeats: 1 + 2 + 1 = 4 data rows per batch.
  {
    std::istringstream csv(slurp(r1 / "sweep.csv"));
    std::string line;
    int data_rows = 0;
    while (std::getline(csv, line))
      if (!line.empty() && line[0] != '#' && line.rfind("batch,", 0) != 0) ++data_rows;
    if (data_rows != 4) {
      ok = false;
      why << "expected 4 sweep rows, got " << data_rows << "; ";
    }
  }

  report("A8 cli-pipeline-determinism", ok,
         ok ? "gen -> sweep -> art outputs byte-identical across reruns and 1 vs 3 jobs; "
              "lambda {0,50,100} x 2 repeats = 4 rows"
            : why.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-tagnoise-cli>\n", argv[0]);
    return 2;
  }
  std::string cli = argv[1];

  criterion_numerical_core();
  criterion_metric_oracles();
  criterion_codec();

  // Full default-scale sweep once; it feeds the protocol criterion.
  {
    auto t0 = Clock::now();
    GenConfig cfg;  // defaults: 300 docs, 9 concepts, 0.87 rate, 17.33 tokens
    cfg.seed = 424242;
    AnnotatedCorpus corpus = generate_corpus(cfg);
    CoderProfile profile;  // the CLI's default overannotating profile
    profile.mention_drop_prob = 0.05;
    profile.spurious_mention_rate = 0.05;
    profile.boundary_extend_mean = 1.35;
    profile.boundary_extend_sd = 0.7;
    profile.mention_rate_multiplier = 1.157;
    corpus.annotations["noisy"] =
        apply_coder(corpus, "gold", profile, derive_seed(cfg.seed, "noisy-coder"));

    SweepConfig config;  // defaults: lambda {0..100}, 10 repeats
    config.master_seed = 2026;
    config.jobs = default_jobs();
    auto ids = corpus.document_ids();
    std::size_t n_train = static_cast<std::size_t>(0.4 * static_cast<double>(ids.size()) + 0.5);
    config.train_docs.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    config.test_docs.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());

    SweepResult merged = run_sweep(config, corpus, 1);
    SweepConfig batch2 = config;
    std::swap(batch2.coder_alpha, batch2.coder_beta);
    SweepResult second = run_sweep(batch2, corpus, 2);
    for (auto& r : second.runs) merged.runs.push_back(std::move(r));
    for (auto& s : second.stats) merged.stats.push_back(s);
    double elapsed = seconds_since(t0);
    criterion_protocol(merged, elapsed);
  }
  criterion_protocol_determinism();

  criteria_quality_and_significance();
  criterion_kfold();
  criterion_cli_determinism(cli);

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
