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

#include "tagnoise/learner.hpp"

namespace tagnoise {

TaggerWeights CrfLearner::train(const std::vector<TaggedInstance>& instances,
                                std::size_t feature_count, std::uint64_t seed) const {
  TrainConfig cfg = config_;
  cfg.seed = seed;
  return train_crf(instances, feature_count, cfg).weights;
}

TaggerWeights PerceptronLearner::train(const std::vector<TaggedInstance>& instances,
                                       std::size_t feature_count, std::uint64_t seed) const {
  PerceptronConfig cfg = config_;
  cfg.seed = seed;
  return train_perceptron(instances, feature_count, cfg).averaged;
}

std::unique_ptr<Learner> make_learner(const std::string& name, const TrainConfig& crf_config,
                                      const PerceptronConfig& perceptron_config) {
  if (name == "crf") return std::make_unique<CrfLearner>(crf_config);
  if (name == "perceptron") return std::make_unique<PerceptronLearner>(perceptron_config);
  throw Error("unknown learner '" + name + "' (expected 'crf' or 'perceptron')");
}

std::vector<TaggedInstance> build_instances(
    const std::vector<const Document*>& docs,
    const std::vector<const std::vector<TokenFeatureVector>*>& doc_features,
    const AnnotationSet& annotations, const std::string& concept_id) {
  if (docs.size() != doc_features.size())
    throw Error("build_instances: feature list does not match document list");
  std::vector<TaggedInstance> out;
  out.reserve(docs.size());
  static const SpanList kEmpty;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document& d = *docs[i];
    const SpanList* spans = &kEmpty;
    auto dit = annotations.find(d.id);
    if (dit != annotations.end()) {
      auto kit = dit->second.find(concept_id);
      if (kit != dit->second.end()) spans = &kit->second;
    }
    TaggedInstance inst;
    inst.features = *doc_features[i];
    inst.gold = to_iob(mentions_to_labels(d, *spans, concept_id), d).tags;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace tagnoise
