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

#include <array>
#include <cstddef>
#include <vector>

#include "tagnoise/corpus.hpp"
#include "tagnoise/features.hpp"

namespace tagnoise {

inline constexpr std::size_t kNumLabels = 3;  // B, I, O

/// Linear sequence-tagger parameters over the {B, I, O} label space:
/// per-feature emission weights and first-order transition weights.
/// Transitions carry no structural constraints; IOB validity is enforced
/// at decode time.
struct TaggerWeights {
  std::vector<double> emission;          ///< [feature * 3 + label]
  std::array<double, 9> transition{};    ///< [prev * 3 + next]

  explicit TaggerWeights(std::size_t feature_count = 0)
      : emission(feature_count * kNumLabels, 0.0) {}

  std::size_t feature_count() const { return emission.size() / kNumLabels; }

  double emit(FeatureId f, std::size_t label) const {
    return emission[static_cast<std::size_t>(f) * kNumLabels + label];
  }
  double trans(std::size_t prev, std::size_t next) const {
    return transition[prev * kNumLabels + next];
  }
};

/// One training/decoding instance: per-token features plus gold tags.
struct TaggedInstance {
  std::vector<TokenFeatureVector> features;
  std::vector<IobTag> gold;  ///< empty when only decoding
};

/// Emission scores for every position of an instance: scores[t*3 + y].
void emission_scores(const TaggerWeights& w, const std::vector<TokenFeatureVector>& features,
                     std::vector<double>& scores);

/// Raw (unnormalized) score of a tag sequence.
double sequence_score(const TaggerWeights& w, const std::vector<TokenFeatureVector>& features,
                      const std::vector<IobTag>& tags);

/// Max-score IOB-valid tag sequence (no initial I, no I after O).
///
/// Ties are broken toward the greatest label in the order B < I < O, both
/// when choosing backpointers and when choosing the final label, so an
/// all-zero model decodes all-O.
std::vector<IobTag> viterbi_decode(const TaggerWeights& w,
                                   const std::vector<TokenFeatureVector>& features);

}  // namespace tagnoise
