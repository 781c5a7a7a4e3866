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
#include <string>
#include <unordered_map>
#include <vector>

#include "tagnoise/corpus.hpp"

namespace tagnoise {

using FeatureId = std::uint32_t;

/// Sparse binary feature vector for one token: sorted, deduplicated ids.
using TokenFeatureVector = std::vector<FeatureId>;

/// Bidirectional feature-string <-> id map.
///
/// Id 0 is reserved for unknown features. While unfrozen, new strings are
/// assigned ids in first-seen order; once frozen, unseen strings map to
/// the UNK id and the index never grows.
class FeatureIndex {
 public:
  static constexpr FeatureId kUnk = 0;

  FeatureIndex();

  FeatureId intern(const std::string& feature);
  FeatureId lookup(const std::string& feature) const;  ///< kUnk if absent
  const std::string& name(FeatureId id) const;

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }
  std::size_t size() const { return names_.size(); }

  const std::vector<std::string>& names() const { return names_; }

  /// Rebuilds an index from a dumped name list (names[0] must be the UNK
  /// marker). The result is frozen.
  static FeatureIndex from_names(const std::vector<std::string>& names);

 private:
  std::unordered_map<std::string, FeatureId> ids_;
  std::vector<std::string> names_;
  bool frozen_ = false;
};

/// Naive deterministic stemmer: lowercases and strips one suffix from a
/// fixed ordered list, keeping at least 3 characters. Idempotent.
std::string default_stem(const std::string& token);

/// Capitalization shape of a token.
enum class TokenShape { AllUpper, AllLower, InitCap, Mixed, NonAlpha };
const char* shape_name(TokenShape s);
TokenShape token_shape(const std::string& token);

/// Positional bucket: with p = ordinal / max(count - 1, 1), returns
/// min(floor(p * k) + 1, k), i.e. which of k equal parts of the document
/// the token falls in (1-based).
int position_bucket(std::size_t token_ordinal, std::size_t token_count, int k);

/// Extracts the per-token feature vectors of a document: word identity,
/// stem (supplied or default), POS when supplied, prefixes/suffixes of
/// length 1..4, capitalization shape, and positional buckets for k in
/// {2, 3, 4, 5}. Pure; parallel over documents.
std::vector<TokenFeatureVector> extract_features(const Document& doc, FeatureIndex& index);

}  // namespace tagnoise
