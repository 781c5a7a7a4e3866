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

#include <benchmark/benchmark.h>

#include <sstream>

#include "tagnoise/eval.hpp"
#include "tagnoise/features.hpp"
#include "tagnoise/simcorpus.hpp"

namespace {

using namespace tagnoise;

GenConfig bench_config() {
  GenConfig cfg;
  cfg.documents = 50;
  cfg.seed = 3;
  return cfg;
}

void BM_GenerateCorpus(benchmark::State& state) {
  GenConfig cfg = bench_config();
  for (auto _ : state) {
    AnnotatedCorpus corpus = generate_corpus(cfg);
    benchmark::DoNotOptimize(corpus.documents.size());
  }
}
BENCHMARK(BM_GenerateCorpus);

void BM_ExtractFeatures(benchmark::State& state) {
  AnnotatedCorpus corpus = generate_corpus(bench_config());
  for (auto _ : state) {
    FeatureIndex index;
    std::size_t total = 0;
    for (const auto& d : corpus.documents) total += extract_features(d, index).size();
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_ExtractFeatures);

void BM_SerializeParse(benchmark::State& state) {
  AnnotatedCorpus corpus = generate_corpus(bench_config());
  for (auto _ : state) {
    std::ostringstream out;
    serialize_corpus(corpus, out);
    std::istringstream in(out.str());
    AnnotatedCorpus back = parse_corpus(in);
    benchmark::DoNotOptimize(back.documents.size());
  }
}
BENCHMARK(BM_SerializeParse);

void BM_PooledKappa(benchmark::State& state) {
  AnnotatedCorpus corpus = generate_corpus(bench_config());
  CoderProfile p;
  p.mention_drop_prob = 0.1;
  p.boundary_extend_mean = 1.0;
  p.boundary_extend_sd = 0.5;
  corpus.annotations["noisy"] = apply_coder(corpus, "gold", p, 5);
  auto ids = corpus.document_ids();
  for (auto _ : state) {
    KappaResult k =
        pooled_kappa(corpus, "gold", "noisy", ids, corpus.concept_set.concepts);
    benchmark::DoNotOptimize(k.kappa);
  }
}
BENCHMARK(BM_PooledKappa);

}  // namespace
