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

#include <memory>
#include <string>
#include <vector>

#include "tagnoise/corpus.hpp"
#include "tagnoise/crf.hpp"
#include "tagnoise/perceptron.hpp"
#include "tagnoise/tagger.hpp"

namespace tagnoise {

/// Uniform trainer interface so experiment harnesses can swap sequence
/// learners. Implementations must be deterministic given the seed.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  virtual TaggerWeights train(const std::vector<TaggedInstance>& instances,
                              std::size_t feature_count, std::uint64_t seed) const = 0;
};

class CrfLearner : public Learner {
 public:
  explicit CrfLearner(TrainConfig config = {}) : config_(config) {}
  std::string name() const override { return "crf"; }
  TaggerWeights train(const std::vector<TaggedInstance>& instances,
                      std::size_t feature_count, std::uint64_t seed) const override;
  const TrainConfig& config() const { return config_; }

 private:
  TrainConfig config_;
};

class PerceptronLearner : public Learner {
 public:
  explicit PerceptronLearner(PerceptronConfig config = {}) : config_(config) {}
  std::string name() const override { return "perceptron"; }
  TaggerWeights train(const std::vector<TaggedInstance>& instances,
                      std::size_t feature_count, std::uint64_t seed) const override;
  const PerceptronConfig& config() const { return config_; }

 private:
  PerceptronConfig config_;
};

/// "crf" or "perceptron"; throws on anything else.
std::unique_ptr<Learner> make_learner(const std::string& name, const TrainConfig& crf_config,
                                      const PerceptronConfig& perceptron_config);

/// Builds per-concept training instances: gold IOB tags are derived from
/// the annotation spans of each document. `doc_features[i]` must be the
/// extracted features of `docs[i]`.
std::vector<TaggedInstance> build_instances(
    const std::vector<const Document*>& docs,
    const std::vector<const std::vector<TokenFeatureVector>*>& doc_features,
    const AnnotationSet& annotations, const std::string& concept_id);

}  // namespace tagnoise
