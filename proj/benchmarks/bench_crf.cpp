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

#include "tagnoise/crf.hpp"
#include "tagnoise/rng.hpp"

namespace {

using namespace tagnoise;

struct Fixture {
  TaggerWeights weights;
  std::vector<std::vector<TokenFeatureVector>> instances;

  explicit Fixture(std::size_t n_instances, std::size_t length, std::size_t n_features) {
    Rng rng(7);
    weights = TaggerWeights(n_features);
    for (auto& w : weights.emission) w = rng.real01() - 0.5;
    for (auto& w : weights.transition) w = rng.real01() - 0.5;
    for (std::size_t i = 0; i < n_instances; ++i) {
      std::vector<TokenFeatureVector> feats(length);
      for (auto& fv : feats) {
        for (int k = 0; k < 15; ++k)
          fv.push_back(static_cast<FeatureId>(rng.below(n_features)));
        std::sort(fv.begin(), fv.end());
        fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
      }
      instances.push_back(std::move(feats));
    }
  }
};

void BM_ForwardBackward(benchmark::State& state) {
  Fixture fx(1, static_cast<std::size_t>(state.range(0)), 5000);
  for (auto _ : state) {
    CrfMarginals m = forward_backward(fx.weights, fx.instances[0]);
    benchmark::DoNotOptimize(m.log_z);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(50)->Arg(200)->Arg(800);

void BM_Viterbi(benchmark::State& state) {
  Fixture fx(1, static_cast<std::size_t>(state.range(0)), 5000);
  for (auto _ : state) {
    auto tags = viterbi_decode(fx.weights, fx.instances[0]);
    benchmark::DoNotOptimize(tags.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Viterbi)->Arg(50)->Arg(200)->Arg(800);

void BM_NllGradient(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)), 100, 5000);
  std::vector<TaggedInstance> data;
  for (auto& feats : fx.instances) {
    TaggedInstance inst;
    inst.features = feats;
    inst.gold.assign(feats.size(), IobTag::O);
    data.push_back(std::move(inst));
  }
  std::vector<double> grad;
  for (auto _ : state) {
    double nll = nll_gradient(fx.weights, data, 10.0, grad);
    benchmark::DoNotOptimize(nll);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_NllGradient)->Arg(10)->Arg(50);

}  // namespace
