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
#include <vector>

#include "tagnoise/tagger.hpp"

namespace tagnoise {

struct PerceptronConfig {
  int epochs = 10;
  std::uint64_t seed = 0;  ///< seeds the per-epoch instance shuffle

  void validate() const;
};

/// Averaged structured perceptron model. `averaged` holds the running mean
/// of the weight vector over all instance steps; decode with it.
struct PerceptronModel {
  TaggerWeights raw;       ///< final unaveraged weights
  TaggerWeights averaged;  ///< mean over all (epochs * instances) steps
  long long updates = 0;   ///< number of mistake-driven updates
  int epochs = 0;
};

/// Trains by the standard mistake-driven update: decode with the current
/// weights (IOB-constrained Viterbi), and on error add the gold feature
/// counts and subtract the predicted ones. Deterministic given seed.
PerceptronModel train_perceptron(const std::vector<TaggedInstance>& instances,
                                 std::size_t feature_count, const PerceptronConfig& config);

}  // namespace tagnoise
