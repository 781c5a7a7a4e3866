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

#include "tagnoise/tagger.hpp"

#include <limits>

namespace tagnoise {

void emission_scores(const TaggerWeights& w, const std::vector<TokenFeatureVector>& features,
                     std::vector<double>& scores) {
  std::size_t T = features.size();
  scores.assign(T * kNumLabels, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double b = 0.0, i = 0.0, o = 0.0;
    for (FeatureId f : features[t]) {
      const double* row = &w.emission[static_cast<std::size_t>(f) * kNumLabels];
      b += row[0];
      i += row[1];
      o += row[2];
    }
    scores[t * kNumLabels + 0] = b;
    scores[t * kNumLabels + 1] = i;
    scores[t * kNumLabels + 2] = o;
  }
}

double sequence_score(const TaggerWeights& w, const std::vector<TokenFeatureVector>& features,
                      const std::vector<IobTag>& tags) {
  double score = 0.0;
  for (std::size_t t = 0; t < features.size(); ++t) {
    std::size_t y = static_cast<std::size_t>(tags[t]);
    for (FeatureId f : features[t]) score += w.emit(f, y);
    if (t > 0) score += w.trans(static_cast<std::size_t>(tags[t - 1]), y);
  }
  return score;
}

std::vector<IobTag> viterbi_decode(const TaggerWeights& w,
                                   const std::vector<TokenFeatureVector>& features) {
  std::size_t T = features.size();
  if (T == 0) return {};
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> emit;
  emission_scores(w, features, emit);

  std::vector<double> delta(T * kNumLabels, kNegInf);
  std::vector<unsigned char> back(T * kNumLabels, 0);

  // Initial I is invalid.
  delta[0] = emit[0];
  delta[1] = kNegInf;
  delta[2] = emit[2];

  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t y = 0; y < kNumLabels; ++y) {
      double best = kNegInf;
      unsigned char arg = 0;
      for (std::size_t p = 0; p < kNumLabels; ++p) {
        if (y == 1 && p == 2) continue;  // O -> I forbidden
        double cand = delta[(t - 1) * kNumLabels + p] + w.trans(p, y);
        if (cand >= best) {  // >= : tied predecessors prefer the greater label
          best = cand;
          arg = static_cast<unsigned char>(p);
        }
      }
      delta[t * kNumLabels + y] = best + emit[t * kNumLabels + y];
      back[t * kNumLabels + y] = arg;
    }
  }

  double best = kNegInf;
  std::size_t last = 0;
  for (std::size_t y = 0; y < kNumLabels; ++y) {
    if (delta[(T - 1) * kNumLabels + y] >= best) {
      best = delta[(T - 1) * kNumLabels + y];
      last = y;
    }
  }

  std::vector<IobTag> tags(T);
  for (std::size_t t = T; t-- > 0;) {
    tags[t] = static_cast<IobTag>(last);
    if (t > 0) last = back[t * kNumLabels + last];
  }
  return tags;
}

}  // namespace tagnoise
