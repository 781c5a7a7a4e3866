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

#include "tagnoise/perceptron.hpp"

#include <numeric>

#include "tagnoise/rng.hpp"

namespace tagnoise {

void PerceptronConfig::validate() const {
  if (epochs < 1) throw Error("PerceptronConfig: epochs must be >= 1");
}

namespace {

void validate_gold(const std::vector<TaggedInstance>& instances) {
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const TaggedInstance& inst = instances[i];
    if (inst.gold.size() != inst.features.size())
      throw Error("instance " + std::to_string(i) + ": gold tag count mismatch");
    for (std::size_t t = 0; t < inst.gold.size(); ++t) {
      if (inst.gold[t] == IobTag::I &&
          (t == 0 || inst.gold[t - 1] == IobTag::O))
        throw Error("instance " + std::to_string(i) + ": invalid gold IOB tags");
    }
  }
}

}  // namespace

PerceptronModel train_perceptron(const std::vector<TaggedInstance>& instances,
                                 std::size_t feature_count, const PerceptronConfig& config) {
  config.validate();
  if (instances.empty()) throw Error("train_perceptron: no training instances");
  validate_gold(instances);

  PerceptronModel model;
  model.raw = TaggerWeights(feature_count);
  model.epochs = config.epochs;

  std::size_t n_emit = feature_count * kNumLabels;
  std::size_t dim = n_emit + 9;

  // Lazy averaging: sum[k] accumulates w[k] * (steps it stayed unchanged).
  std::vector<double> sum(dim, 0.0);
  std::vector<long long> last_touch(dim, 0);
  long long step = 0;

  auto weight_at = [&](std::size_t k) -> double& {
    return k < n_emit ? model.raw.emission[k] : model.raw.transition[k - n_emit];
  };
  auto touch = [&](std::size_t k, double delta) {
    sum[k] += weight_at(k) * static_cast<double>(step - last_touch[k]);
    last_touch[k] = step;
    weight_at(k) += delta;
  };

  std::vector<std::size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);

  Rng rng(derive_seed(config.seed, "perceptron-shuffle"));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t idx : order) {
      const TaggedInstance& inst = instances[idx];
      std::vector<IobTag> pred = viterbi_decode(model.raw, inst.features);
      if (pred != inst.gold) {
        ++model.updates;
        for (std::size_t t = 0; t < inst.features.size(); ++t) {
          std::size_t gy = static_cast<std::size_t>(inst.gold[t]);
          std::size_t py = static_cast<std::size_t>(pred[t]);
          if (gy != py) {
            for (FeatureId f : inst.features[t]) {
              touch(static_cast<std::size_t>(f) * kNumLabels + gy, +1.0);
              touch(static_cast<std::size_t>(f) * kNumLabels + py, -1.0);
            }
          }
          if (t > 0) {
            std::size_t gp = static_cast<std::size_t>(inst.gold[t - 1]);
            std::size_t pp = static_cast<std::size_t>(pred[t - 1]);
            if (gp != pp || gy != py) {
              touch(n_emit + gp * 3 + gy, +1.0);
              touch(n_emit + pp * 3 + py, -1.0);
            }
          }
        }
      }
      // The averaged vector counts the weights as they stand after each
      // instance, including the one that triggered the update.
      ++step;
    }
  }

  model.averaged = TaggerWeights(feature_count);
  double total = static_cast<double>(step);
  for (std::size_t k = 0; k < dim; ++k) {
    double s = sum[k] + weight_at(k) * static_cast<double>(step - last_touch[k]);
    double avg = total > 0.0 ? s / total : 0.0;
    if (k < n_emit)
      model.averaged.emission[k] = avg;
    else
      model.averaged.transition[k - n_emit] = avg;
  }
  return model;
}

}  // namespace tagnoise
