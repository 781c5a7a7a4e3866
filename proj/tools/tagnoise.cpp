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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tagnoise/config.hpp"
#include "tagnoise/corpus.hpp"
#include "tagnoise/eval.hpp"
#include "tagnoise/learner.hpp"
#include "tagnoise/model_io.hpp"
#include "tagnoise/parallel.hpp"
#include "tagnoise/protocol.hpp"
#include "tagnoise/rng.hpp"
#include "tagnoise/significance.hpp"
#include "tagnoise/simcorpus.hpp"
#include "tagnoise/version.hpp"

namespace {

using namespace tagnoise;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("I/O error while writing '" + path + "'");
}

// Sibling metadata file recording the exact result-affecting config and seed.
void write_meta(const std::string& out_path,
                const std::map<std::string, std::string>& entries) {
  nlohmann::json j;
  j["tool_version"] = kVersion;
  for (const auto& [k, v] : entries) j[k] = v;
  write_text_file(out_path + ".meta.json", j.dump(2) + "\n");
}

std::vector<std::string> meta_lines(const std::map<std::string, std::string>& entries) {
  std::vector<std::string> lines;
  lines.push_back(std::string("tool_version=") + kVersion);
  for (const auto& [k, v] : entries) lines.push_back(k + "=" + v);
  return lines;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<int> parse_lambda_grid(const std::string& text) {
  std::vector<int> grid;
  std::istringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t pos = 0;
      int v = std::stoi(part, &pos);
      if (pos != part.size()) throw std::invalid_argument("");
      grid.push_back(v);
    } catch (const std::exception&) {
      throw Error("bad lambda grid entry '" + part + "'");
    }
  }
  return grid;
}

// Seeded train/test split over all documents both coders cover.
void split_docs(const AnnotatedCorpus& corpus, double train_frac, std::uint64_t seed,
                std::vector<std::string>& train, std::vector<std::string>& test) {
  std::vector<std::string> ids = corpus.document_ids();
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(ids);
  std::size_t n_train = static_cast<std::size_t>(train_frac * static_cast<double>(ids.size()) + 0.5);
  if (n_train < 1) n_train = 1;
  if (n_train >= ids.size()) n_train = ids.size() - 1;
  train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenArgs {
  std::string out;
  std::string config_file;
  std::string noisy_coder = "noisy";
  GenConfig gen;
  CoderProfile profile;
  double target_kappa = -1.0;
  double kappa_tol = 0.02;
  bool have_profile_defaults = true;
};

int cmd_gen(GenArgs& args, const CLI::App& sub) {
  if (!args.config_file.empty()) {
    KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_file);
    // Flags override file values: only apply keys whose flag was not given.
    auto absent = [&](const std::string& flag) { return sub.count(flag) == 0; };
    if (absent("--docs")) args.gen.documents = cfg.get_int("docs", args.gen.documents);
    if (absent("--concepts")) args.gen.concepts = cfg.get_int("concepts", args.gen.concepts);
    if (absent("--tokens-min")) args.gen.tokens_min = cfg.get_int("tokens_min", args.gen.tokens_min);
    if (absent("--tokens-max")) args.gen.tokens_max = cfg.get_int("tokens_max", args.gen.tokens_max);
    if (absent("--mention-rate"))
      args.gen.mention_rate = cfg.get_double("mention_rate", args.gen.mention_rate);
    if (absent("--mention-len-mean"))
      args.gen.mention_len_mean = cfg.get_double("mention_len_mean", args.gen.mention_len_mean);
    if (absent("--cue-density"))
      args.gen.cue_density = cfg.get_double("cue_density", args.gen.cue_density);
    if (absent("--seed")) args.gen.seed = cfg.get_u64("seed", args.gen.seed);
    if (absent("--drop-prob"))
      args.profile.mention_drop_prob = cfg.get_double("drop_prob", args.profile.mention_drop_prob);
    if (absent("--spurious-rate"))
      args.profile.spurious_mention_rate =
          cfg.get_double("spurious_rate", args.profile.spurious_mention_rate);
    if (absent("--extend-mean"))
      args.profile.boundary_extend_mean =
          cfg.get_double("extend_mean", args.profile.boundary_extend_mean);
    if (absent("--extend-sd"))
      args.profile.boundary_extend_sd =
          cfg.get_double("extend_sd", args.profile.boundary_extend_sd);
    if (absent("--rate-multiplier"))
      args.profile.mention_rate_multiplier =
          cfg.get_double("rate_multiplier", args.profile.mention_rate_multiplier);
    if (absent("--target-kappa")) args.target_kappa = cfg.get_double("target_kappa", args.target_kappa);
    if (absent("--kappa-tol")) args.kappa_tol = cfg.get_double("kappa_tol", args.kappa_tol);
  }

  AnnotatedCorpus corpus = generate_corpus(args.gen);
  std::uint64_t coder_seed = derive_seed(args.gen.seed, "noisy-coder");

  CoderProfile profile = args.profile;
  std::map<std::string, std::string> meta;
  if (args.target_kappa > 0.0) {
    CalibrationResult cal =
        calibrate_to_kappa(corpus, "gold", args.profile, args.target_kappa, args.kappa_tol,
                           coder_seed);
    profile = cal.profile;
    meta["calibration_target_kappa"] = fmt(args.target_kappa);
    meta["calibration_achieved_kappa"] = fmt(cal.achieved_kappa);
    meta["calibration_noise_scale"] = fmt(cal.noise_scale);
    meta["calibration_steps"] = std::to_string(cal.bisection_steps);
  }
  corpus.annotations[args.noisy_coder] = apply_coder(corpus, "gold", profile, coder_seed);
  corpus.validate();
  serialize_corpus_file(corpus, args.out);

  meta["seed"] = std::to_string(args.gen.seed);
  meta["docs"] = std::to_string(args.gen.documents);
  meta["concepts"] = std::to_string(args.gen.concepts);
  meta["tokens_min"] = std::to_string(args.gen.tokens_min);
  meta["tokens_max"] = std::to_string(args.gen.tokens_max);
  meta["mention_rate"] = fmt(args.gen.mention_rate);
  meta["mention_len_mean"] = fmt(args.gen.mention_len_mean);
  meta["cue_density"] = fmt(args.gen.cue_density);
  meta["noisy_coder"] = args.noisy_coder;
  meta["drop_prob"] = fmt(profile.mention_drop_prob);
  meta["spurious_rate"] = fmt(profile.spurious_mention_rate);
  meta["extend_mean"] = fmt(profile.boundary_extend_mean);
  meta["extend_sd"] = fmt(profile.boundary_extend_sd);
  meta["rate_multiplier"] = fmt(profile.mention_rate_multiplier);
  write_meta(args.out, meta);

  KappaResult kappa = pooled_kappa(corpus, "gold", args.noisy_coder, corpus.document_ids(),
                                   corpus.concept_set.concepts);
  std::cout << "wrote " << corpus.documents.size() << " documents to " << args.out
            << " (gold/" << args.noisy_coder << " pooled kappa " << fmt(kappa.kappa) << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

int cmd_stats(const std::string& in, bool as_json) {
  AnnotatedCorpus corpus = parse_corpus_file(in);
  CorpusStats stats = compute_stats(corpus);
  if (as_json) {
    nlohmann::json j;
    j["documents"] = stats.document_count;
    j["concepts"] = stats.concept_count;
    for (const auto& [coder, cells] : stats.per_coder_concept) {
      for (const auto& [concept_id, cell] : cells) {
        j["coders"][coder]["per_concept"][concept_id] = {
            {"tokens", cell.tokens_annotated},
            {"mentions", cell.mentions},
            {"mean_mention_tokens", cell.mean_mention_tokens}};
      }
      const auto& total = stats.totals.at(coder);
      j["coders"][coder]["total"] = {{"tokens", total.tokens_annotated},
                                     {"mentions", total.mentions},
                                     {"mean_mention_tokens", total.mean_mention_tokens}};
      j["coders"][coder]["mentions_per_concept_per_doc"] =
          stats.mentions_per_concept_per_doc.at(coder);
    }
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }

  std::cout << "documents: " << stats.document_count
            << "  concepts: " << stats.concept_count << "\n\n";
  for (const auto& [coder, cells] : stats.per_coder_concept) {
    std::cout << "coder " << coder << ":\n";
    std::cout << "  concept      tokens  mentions  mean_len\n";
    for (const auto& [concept_id, cell] : cells) {
      std::printf("  %-10s %8lld %9lld %9.2f\n", concept_id.c_str(), cell.tokens_annotated,
                  cell.mentions, cell.mean_mention_tokens);
    }
    const auto& total = stats.totals.at(coder);
    std::printf("  %-10s %8lld %9lld %9.2f\n", "total", total.tokens_annotated,
                total.mentions, total.mean_mention_tokens);
    std::printf("  mentions per concept per document: %.4f\n\n",
                stats.mentions_per_concept_per_doc.at(coder));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train / eval
// ---------------------------------------------------------------------------

struct LearnerArgs {
  std::string learner = "crf";
  double crf_sigma = 10.0;
  int crf_max_iters = 200;
  double crf_tol = 1e-5;
  std::string crf_optimizer = "lbfgs";
  int epochs = 10;

  TrainConfig crf_config() const {
    TrainConfig cfg;
    cfg.l2_sigma = crf_sigma;
    cfg.max_iterations = crf_max_iters;
    cfg.nll_rel_tol = crf_tol;
    if (crf_optimizer == "lbfgs")
      cfg.optimizer = TrainConfig::Optimizer::Lbfgs;
    else if (crf_optimizer == "gd")
      cfg.optimizer = TrainConfig::Optimizer::GradientDescent;
    else
      throw Error("unknown optimizer '" + crf_optimizer + "' (expected lbfgs or gd)");
    return cfg;
  }
  PerceptronConfig perceptron_config() const {
    PerceptronConfig cfg;
    cfg.epochs = epochs;
    return cfg;
  }
  void add_flags(CLI::App* sub) {
    sub->add_option("--learner", learner, "Sequence learner: crf or perceptron")
        ->check(CLI::IsMember({"crf", "perceptron"}));
    sub->add_option("--crf-sigma", crf_sigma, "CRF Gaussian prior std");
    sub->add_option("--crf-max-iters", crf_max_iters, "CRF max training iterations");
    sub->add_option("--crf-tol", crf_tol, "CRF relative NLL convergence tolerance");
    sub->add_option("--crf-optimizer", crf_optimizer, "CRF optimizer: lbfgs or gd")
        ->check(CLI::IsMember({"lbfgs", "gd"}));
    sub->add_option("--epochs", epochs, "Perceptron training epochs");
  }
  std::map<std::string, std::string> echo() const {
    return {{"learner", learner},
            {"crf_sigma", fmt(crf_sigma)},
            {"crf_max_iters", std::to_string(crf_max_iters)},
            {"crf_tol", fmt(crf_tol)},
            {"crf_optimizer", crf_optimizer},
            {"epochs", std::to_string(epochs)}};
  }
};

int cmd_train(const std::string& in, const std::string& coder, const std::string& out,
              std::uint64_t seed, const LearnerArgs& largs) {
  AnnotatedCorpus corpus = parse_corpus_file(in);
  auto ait = corpus.annotations.find(coder);
  if (ait == corpus.annotations.end()) throw Error("unknown coder '" + coder + "'");

  std::vector<const Document*> docs;
  for (const auto& [doc_id, _] : ait->second) docs.push_back(&corpus.doc(doc_id));

  FeatureIndex index;
  std::vector<std::vector<TokenFeatureVector>> feats;
  for (const Document* d : docs) feats.push_back(extract_features(*d, index));
  index.freeze();
  std::vector<const std::vector<TokenFeatureVector>*> feat_ptrs;
  for (const auto& f : feats) feat_ptrs.push_back(&f);

  std::unique_ptr<Learner> learner =
      make_learner(largs.learner, largs.crf_config(), largs.perceptron_config());

  ModelBundle bundle;
  bundle.learner = largs.learner;
  bundle.index = index;
  for (const auto& concept_id : corpus.concept_set.concepts) {
    std::vector<TaggedInstance> instances =
        build_instances(docs, feat_ptrs, ait->second, concept_id);
    bundle.per_concept[concept_id] =
        learner->train(instances, index.size(), derive_seed(seed, concept_id));
  }
  bundle.metadata["seed"] = std::to_string(seed);
  bundle.metadata["coder"] = coder;
  bundle.metadata["corpus"] = in;
  for (const auto& [k, v] : largs.echo()) bundle.metadata[k] = v;

  save_model_file(bundle, out);
  std::cout << "trained " << bundle.per_concept.size() << " concept taggers ("
            << largs.learner << ") -> " << out << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& in,
             const std::string& gold_coder, const std::string& out_report,
             const std::string& out_tables, const std::string& out_json) {
  ModelBundle bundle = load_model_file(model_path);
  AnnotatedCorpus corpus = parse_corpus_file(in);
  auto git = corpus.annotations.find(gold_coder);
  if (git == corpus.annotations.end()) throw Error("unknown coder '" + gold_coder + "'");

  DocTables doc_tables;
  std::map<std::string, ContingencyTable> per_concept;
  for (const auto& [doc_id, _] : git->second) {
    const Document& d = corpus.doc(doc_id);
    std::vector<TokenFeatureVector> feats = extract_features(d, bundle.index);
    for (const auto& [concept_id, weights] : bundle.per_concept) {
      IobSequence pred_tags{concept_id, viterbi_decode(weights, feats)};
      LabelSequence pred = from_iob(pred_tags, d);
      LabelSequence gold =
          mentions_to_labels(d, corpus.spans(gold_coder, doc_id, concept_id), concept_id);
      ContingencyTable t = tunit_table(pred, gold);
      doc_tables.tables[doc_id][concept_id] = t;
      per_concept[concept_id] += t;
    }
  }
  EvalReport report = micro_macro(per_concept);

  std::map<std::string, std::string> meta = {{"model", model_path},
                                             {"corpus", in},
                                             {"gold_coder", gold_coder}};
  if (!out_report.empty()) {
    std::ofstream out(out_report);
    if (!out) throw Error("cannot open '" + out_report + "' for writing");
    write_report_csv(report, out, meta_lines(meta));
  }
  if (!out_tables.empty()) {
    std::ofstream out(out_tables);
    if (!out) throw Error("cannot open '" + out_tables + "' for writing");
    write_doc_tables_csv(doc_tables, out, meta_lines(meta));
  }
  if (!out_json.empty()) write_text_file(out_json, report_to_json(report) + "\n");

  std::printf("micro F1 %.4f  macro F1 %.4f  (precision/recall micro %.4f/%.4f)\n",
              report.f1_micro, report.f1_macro, report.precision_micro,
              report.recall_micro);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string in;
  std::string config_file;
  std::string out_csv;
  std::string out_json;
  std::string emit_tables_dir;
  std::string lambda_grid = "0,10,20,30,40,50,60,70,80,90,100";
  int repeats = 10;
  std::uint64_t seed = 1;
  double train_frac = 0.4;
  std::string alpha = "gold";
  std::string beta = "noisy";
  bool both_batches = false;
  unsigned jobs = 0;
  LearnerArgs largs;
};

int cmd_sweep(SweepArgs& args, const CLI::App& sub) {
  if (!args.config_file.empty()) {
    KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_file);
    auto absent = [&](const std::string& flag) { return sub.count(flag) == 0; };
    if (absent("--lambda-grid"))
      args.lambda_grid = cfg.get_string("lambda_grid", args.lambda_grid);
    if (absent("--repeats")) args.repeats = cfg.get_int("repeats", args.repeats);
    if (absent("--seed")) args.seed = cfg.get_u64("seed", args.seed);
    if (absent("--train-frac")) args.train_frac = cfg.get_double("train_frac", args.train_frac);
    if (absent("--alpha")) args.alpha = cfg.get_string("alpha", args.alpha);
    if (absent("--beta")) args.beta = cfg.get_string("beta", args.beta);
    if (absent("--both-batches") && cfg.has("both_batches"))
      args.both_batches = cfg.get_string("both_batches", "false") == "true";
    if (absent("--learner")) args.largs.learner = cfg.get_string("learner", args.largs.learner);
    if (absent("--crf-sigma"))
      args.largs.crf_sigma = cfg.get_double("crf_sigma", args.largs.crf_sigma);
    if (absent("--crf-max-iters"))
      args.largs.crf_max_iters = cfg.get_int("crf_max_iters", args.largs.crf_max_iters);
    if (absent("--crf-tol")) args.largs.crf_tol = cfg.get_double("crf_tol", args.largs.crf_tol);
    if (absent("--crf-optimizer"))
      args.largs.crf_optimizer = cfg.get_string("crf_optimizer", args.largs.crf_optimizer);
    if (absent("--epochs")) args.largs.epochs = cfg.get_int("epochs", args.largs.epochs);
  }
  AnnotatedCorpus corpus = parse_corpus_file(args.in);

  SweepConfig config;
  config.lambda_grid = parse_lambda_grid(args.lambda_grid);
  config.repeats = args.repeats;
  config.master_seed = args.seed;
  config.learner = args.largs.learner;
  config.crf = args.largs.crf_config();
  config.perceptron = args.largs.perceptron_config();
  config.jobs = args.jobs == 0 ? default_jobs() : args.jobs;
  config.keep_doc_tables = !args.emit_tables_dir.empty();
  split_docs(corpus, args.train_frac, args.seed, config.train_docs, config.test_docs);

  std::map<std::string, std::string> meta = {
      {"corpus", args.in},
      {"seed", std::to_string(args.seed)},
      {"lambda_grid", args.lambda_grid},
      {"repeats", std::to_string(args.repeats)},
      {"train_frac", fmt(args.train_frac)},
      {"coder_alpha", args.alpha},
      {"coder_beta", args.beta},
      {"both_batches", args.both_batches ? "true" : "false"},
      {"train_docs", std::to_string(config.train_docs.size())},
      {"test_docs", std::to_string(config.test_docs.size())}};
  for (const auto& [k, v] : args.largs.echo()) meta[k] = v;

  SweepResult merged;
  int n_batches = args.both_batches ? 2 : 1;
  for (int batch = 1; batch <= n_batches; ++batch) {
    SweepConfig bc = config;
    if (batch == 2) std::swap(bc.coder_alpha, bc.coder_beta);
    if (batch == 1) {
      bc.coder_alpha = args.alpha;
      bc.coder_beta = args.beta;
    } else {
      bc.coder_alpha = args.beta;
      bc.coder_beta = args.alpha;
    }
    SweepResult res = run_sweep(bc, corpus, batch);
    merged.concepts = res.concepts;
    for (auto& r : res.runs) {
      if (!args.emit_tables_dir.empty() && r.doc_tables &&
          (r.lambda == 0 || r.lambda == 100)) {
        std::string path = args.emit_tables_dir + "/tables_batch" + std::to_string(batch) +
                           "_lambda" + std::to_string(r.lambda) + ".csv";
        std::ofstream out(path);
        if (!out) throw Error("cannot open '" + path + "' for writing");
        auto m = meta;
        m["batch"] = std::to_string(batch);
        m["lambda"] = std::to_string(r.lambda);
        write_doc_tables_csv(*r.doc_tables, out, meta_lines(m));
      }
      r.doc_tables.reset();  // not serialized into the CSV
      merged.runs.push_back(std::move(r));
    }
    for (auto& st : res.stats) merged.stats.push_back(st);
  }

  if (!args.out_csv.empty()) {
    std::ofstream out(args.out_csv);
    if (!out) throw Error("cannot open '" + args.out_csv + "' for writing");
    write_sweep_csv(merged, out, meta_lines(meta));
  }
  if (!args.out_json.empty())
    write_text_file(args.out_json, sweep_summary_json(merged, meta) + "\n");

  for (const auto& st : merged.stats) {
    std::printf(
        "batch %d lambda %3d: kappa %.4f  F1u %.4f+-%.4f  F1M %.4f+-%.4f  (%d runs%s)\n",
        st.batch, st.lambda, st.kappa_mean, st.f1_micro_mean, st.f1_micro_std,
        st.f1_macro_mean, st.f1_macro_std, st.runs,
        st.failed ? (", " + std::to_string(st.failed) + " failed").c_str() : "");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// kfold
// ---------------------------------------------------------------------------

int cmd_kfold(const std::string& in, const std::string& coder, int k, std::uint64_t seed,
              unsigned jobs, const LearnerArgs& largs, const std::string& out_report,
              const std::string& out_json) {
  AnnotatedCorpus corpus = parse_corpus_file(in);
  std::unique_ptr<Learner> learner =
      make_learner(largs.learner, largs.crf_config(), largs.perceptron_config());
  EvalReport report =
      kfold_cv(corpus, coder, k, *learner, seed, jobs == 0 ? default_jobs() : jobs);

  std::map<std::string, std::string> meta = {{"corpus", in},
                                             {"coder", coder},
                                             {"k", std::to_string(k)},
                                             {"seed", std::to_string(seed)}};
  for (const auto& [kk, v] : largs.echo()) meta[kk] = v;
  if (!out_report.empty()) {
    std::ofstream out(out_report);
    if (!out) throw Error("cannot open '" + out_report + "' for writing");
    write_report_csv(report, out, meta_lines(meta));
  }
  if (!out_json.empty()) write_text_file(out_json, report_to_json(report) + "\n");
  std::printf("%d-fold CV, coder %s: micro F1 %.4f  macro F1 %.4f\n", k, coder.c_str(),
              report.f1_micro, report.f1_macro);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// art
// ---------------------------------------------------------------------------

int cmd_art(const std::string& a_path, const std::string& b_path, const std::string& metric,
            int shuffles, std::uint64_t seed, const std::string& out_json) {
  ArtInput input;
  input.system_a = read_doc_tables_file(a_path);
  input.system_b = read_doc_tables_file(b_path);
  input.shuffles = shuffles;
  input.seed = seed;
  ArtResult result = art_test(input, art_metric_from_name(metric));
  std::string json = art_result_json(result);
  if (!out_json.empty()) write_text_file(out_json, json + "\n");
  std::cout << json << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annotation-quality experiments for sequence labelling"};
  app.set_version_flag("--version", std::string("tagnoise ") + kVersion + " (corpus format " +
                                        kCorpusFormat + ", model format " +
                                        std::to_string(kModelFormat) + ")");
  app.require_subcommand(1);

  // gen
  GenArgs gen_args;
  gen_args.profile.mention_drop_prob = 0.05;
  gen_args.profile.spurious_mention_rate = 0.05;
  gen_args.profile.boundary_extend_mean = 1.35;
  gen_args.profile.boundary_extend_sd = 0.7;
  gen_args.profile.mention_rate_multiplier = 1.157;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic doubly-annotated corpus");
  gen_cmd->add_option("--out", gen_args.out, "Output corpus JSONL path")->required();
  gen_cmd->add_option("--config", gen_args.config_file, "Key = value config file");
  gen_cmd->add_option("--docs", gen_args.gen.documents, "Document count");
  gen_cmd->add_option("--concepts", gen_args.gen.concepts, "Concept count");
  gen_cmd->add_option("--tokens-min", gen_args.gen.tokens_min, "Min tokens per document");
  gen_cmd->add_option("--tokens-max", gen_args.gen.tokens_max, "Max tokens per document");
  gen_cmd->add_option("--mention-rate", gen_args.gen.mention_rate,
                      "Mentions per concept per document");
  gen_cmd->add_option("--mention-len-mean", gen_args.gen.mention_len_mean,
                      "Mean mention length in tokens");
  gen_cmd->add_option("--cue-density", gen_args.gen.cue_density,
                      "Cue-word probability inside mentions");
  gen_cmd->add_option("--seed", gen_args.gen.seed, "Master seed");
  gen_cmd->add_option("--noisy-coder", gen_args.noisy_coder, "Name of the derived coder");
  gen_cmd->add_option("--drop-prob", gen_args.profile.mention_drop_prob,
                      "Noisy coder: mention drop probability");
  gen_cmd->add_option("--spurious-rate", gen_args.profile.spurious_mention_rate,
                      "Noisy coder: spurious mentions per (doc, concept)");
  gen_cmd->add_option("--extend-mean", gen_args.profile.boundary_extend_mean,
                      "Noisy coder: mean boundary extension per side (tokens; negative shrinks)");
  gen_cmd->add_option("--extend-sd", gen_args.profile.boundary_extend_sd,
                      "Noisy coder: boundary extension std");
  gen_cmd->add_option("--rate-multiplier", gen_args.profile.mention_rate_multiplier,
                      "Noisy coder: mention rate multiplier");
  gen_cmd->add_option("--target-kappa", gen_args.target_kappa,
                      "Calibrate the noise scale to this pooled kappa");
  gen_cmd->add_option("--kappa-tol", gen_args.kappa_tol, "Calibration tolerance");

  // stats
  std::string stats_in;
  bool stats_json = false;
  auto* stats_cmd = app.add_subcommand("stats", "Print per-coder annotation statistics");
  stats_cmd->add_option("--in", stats_in, "Corpus JSONL path")->required();
  stats_cmd->add_flag("--json", stats_json, "Emit JSON instead of text");

  // train
  std::string train_in, train_coder = "gold", train_out;
  std::uint64_t train_seed = 1;
  LearnerArgs train_largs;
  auto* train_cmd = app.add_subcommand("train", "Train per-concept sequence taggers");
  train_cmd->add_option("--in", train_in, "Corpus JSONL path")->required();
  train_cmd->add_option("--coder", train_coder, "Coder whose annotations supervise training");
  train_cmd->add_option("--out", train_out, "Output model path")->required();
  train_cmd->add_option("--seed", train_seed, "Training seed");
  train_largs.add_flags(train_cmd);

  // eval
  std::string eval_model, eval_in, eval_coder = "gold";
  std::string eval_report, eval_tables, eval_json;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model against a coder");
  eval_cmd->add_option("--model", eval_model, "Model path")->required();
  eval_cmd->add_option("--in", eval_in, "Corpus JSONL path")->required();
  eval_cmd->add_option("--gold-coder", eval_coder, "Coder treated as gold standard");
  eval_cmd->add_option("--out-report", eval_report, "Report CSV path");
  eval_cmd->add_option("--out-tables", eval_tables, "Per-document tables CSV path");
  eval_cmd->add_option("--out-json", eval_json, "Report JSON path");

  // sweep
  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Corruption-ratio sweep");
  sweep_cmd->add_option("--in", sweep_args.in, "Corpus JSONL path")->required();
  sweep_cmd->add_option("--config", sweep_args.config_file, "Key = value config file");
  sweep_cmd->add_option("--out-csv", sweep_args.out_csv, "Per-run CSV path");
  sweep_cmd->add_option("--out-json", sweep_args.out_json, "Per-lambda summary JSON path");
  sweep_cmd->add_option("--emit-tables", sweep_args.emit_tables_dir,
                        "Directory for per-document tables of the lambda 0/100 runs");
  sweep_cmd->add_option("--lambda-grid", sweep_args.lambda_grid,
                        "Comma-separated corruption ratios (must include 0 and 100)");
  sweep_cmd->add_option("--repeats", sweep_args.repeats, "Repeats per interior lambda");
  sweep_cmd->add_option("--seed", sweep_args.seed, "Master seed");
  sweep_cmd->add_option("--train-frac", sweep_args.train_frac,
                        "Fraction of documents used for training");
  sweep_cmd->add_option("--alpha", sweep_args.alpha, "Authoritative coder");
  sweep_cmd->add_option("--beta", sweep_args.beta, "Non-authoritative coder");
  sweep_cmd->add_flag("--both-batches", sweep_args.both_batches,
                      "Also run with coder roles swapped (batch 2)");
  sweep_cmd->add_option("--jobs", sweep_args.jobs, "Worker threads (0 = hardware)");
  sweep_args.largs.add_flags(sweep_cmd);

  // kfold
  std::string kfold_in, kfold_coder = "gold", kfold_report, kfold_json;
  int kfold_k = 20;
  std::uint64_t kfold_seed = 1;
  unsigned kfold_jobs = 0;
  LearnerArgs kfold_largs;
  auto* kfold_cmd = app.add_subcommand("kfold", "k-fold cross-validation of one coder");
  kfold_cmd->add_option("--in", kfold_in, "Corpus JSONL path")->required();
  kfold_cmd->add_option("--coder", kfold_coder, "Coder to cross-validate");
  kfold_cmd->add_option("--k", kfold_k, "Fold count");
  kfold_cmd->add_option("--seed", kfold_seed, "Partition seed");
  kfold_cmd->add_option("--jobs", kfold_jobs, "Worker threads (0 = hardware)");
  kfold_cmd->add_option("--out-report", kfold_report, "Report CSV path");
  kfold_cmd->add_option("--out-json", kfold_json, "Report JSON path");
  kfold_largs.add_flags(kfold_cmd);

  // art
  std::string art_a, art_b, art_metric = "micro", art_out;
  int art_shuffles = 9999;
  std::uint64_t art_seed = 1;
  auto* art_cmd =
      app.add_subcommand("art", "Approximate randomization test on two table files");
  art_cmd->add_option("--a", art_a, "System A per-document tables CSV")->required();
  art_cmd->add_option("--b", art_b, "System B per-document tables CSV")->required();
  art_cmd->add_option("--metric", art_metric, "Aggregate metric: micro or macro")
      ->check(CLI::IsMember({"micro", "macro"}));
  art_cmd->add_option("--shuffles", art_shuffles, "Shuffle count R");
  art_cmd->add_option("--seed", art_seed, "Shuffle seed");
  art_cmd->add_option("--out", art_out, "Also write the result JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen_args, *gen_cmd);
    if (stats_cmd->parsed()) return cmd_stats(stats_in, stats_json);
    if (train_cmd->parsed())
      return cmd_train(train_in, train_coder, train_out, train_seed, train_largs);
    if (eval_cmd->parsed())
      return cmd_eval(eval_model, eval_in, eval_coder, eval_report, eval_tables, eval_json);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, *sweep_cmd);
    if (kfold_cmd->parsed())
      return cmd_kfold(kfold_in, kfold_coder, kfold_k, kfold_seed, kfold_jobs, kfold_largs,
                       kfold_report, kfold_json);
    if (art_cmd->parsed())
      return cmd_art(art_a, art_b, art_metric, art_shuffles, art_seed, art_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
