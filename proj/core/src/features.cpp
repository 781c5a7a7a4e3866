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

#include "tagnoise/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace tagnoise {

FeatureIndex::FeatureIndex() {
  names_.push_back("<UNK>");
  ids_.emplace("<UNK>", kUnk);
}

FeatureId FeatureIndex::intern(const std::string& feature) {
  auto it = ids_.find(feature);
  if (it != ids_.end()) return it->second;
  if (frozen_) return kUnk;
  FeatureId id = static_cast<FeatureId>(names_.size());
  names_.push_back(feature);
  ids_.emplace(feature, id);
  return id;
}

FeatureId FeatureIndex::lookup(const std::string& feature) const {
  auto it = ids_.find(feature);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& FeatureIndex::name(FeatureId id) const {
  if (id >= names_.size()) throw Error("feature id " + std::to_string(id) + " out of range");
  return names_[id];
}

FeatureIndex FeatureIndex::from_names(const std::vector<std::string>& names) {
  if (names.empty()) throw Error("feature index dump is empty");
  FeatureIndex index;
  for (std::size_t i = 1; i < names.size(); ++i) {
    FeatureId id = index.intern(names[i]);
    if (id != i) throw Error("duplicate feature string in index dump: '" + names[i] + "'");
  }
  index.freeze();
  return index;
}

namespace {

const std::array<const char*, 7> kStemSuffixes = {"ings", "ies", "ing", "es",
                                                  "ed",   "ly",  "s"};

bool ends_with_suffix(const std::string& w) {
  for (const char* suf : kStemSuffixes) {
    std::size_t n = std::char_traits<char>::length(suf);
    if (w.size() >= n && w.compare(w.size() - n, n, suf) == 0) return true;
  }
  return false;
}

}  // namespace

std::string default_stem(const std::string& token) {
  std::string w;
  w.reserve(token.size());
  for (unsigned char c : token) w.push_back(static_cast<char>(std::tolower(c)));
  // Strip at most one suffix, and only when the remainder ends in no listed
  // suffix; that makes the stemmer idempotent.
  for (const char* suf : kStemSuffixes) {
    std::size_t n = std::char_traits<char>::length(suf);
    if (w.size() >= n + 3 && w.compare(w.size() - n, n, suf) == 0) {
      std::string candidate = w.substr(0, w.size() - n);
      if (!ends_with_suffix(candidate)) return candidate;
    }
  }
  return w;
}

const char* shape_name(TokenShape s) {
  switch (s) {
    case TokenShape::AllUpper: return "ALLUPPER";
    case TokenShape::AllLower: return "ALLLOWER";
    case TokenShape::InitCap: return "INITCAP";
    case TokenShape::Mixed: return "MIXED";
    default: return "NONALPHA";
  }
}

TokenShape token_shape(const std::string& token) {
  bool any_alpha = false, all_upper = true, all_lower = true;
  bool first_alpha_upper = false, rest_lower = true, seen_first = false;
  for (unsigned char c : token) {
    if (!std::isalpha(c)) continue;
    if (!seen_first) {
      seen_first = true;
      first_alpha_upper = std::isupper(c) != 0;
    } else if (std::isupper(c)) {
      rest_lower = false;
    }
    any_alpha = true;
    if (std::isupper(c)) all_lower = false;
    if (std::islower(c)) all_upper = false;
  }
  if (!any_alpha) return TokenShape::NonAlpha;
  if (all_upper) return TokenShape::AllUpper;
  if (all_lower) return TokenShape::AllLower;
  if (first_alpha_upper && rest_lower) return TokenShape::InitCap;
  return TokenShape::Mixed;
}

int position_bucket(std::size_t token_ordinal, std::size_t token_count, int k) {
  // p = ordinal / max(count - 1, 1); bucket = min(floor(p * k) + 1, k).
  // Computed in integers so boundary tokens land deterministically.
  std::size_t denom = token_count > 1 ? token_count - 1 : 1;
  std::size_t bucket = token_ordinal * static_cast<std::size_t>(k) / denom + 1;
  return static_cast<int>(std::min<std::size_t>(bucket, static_cast<std::size_t>(k)));
}

std::vector<TokenFeatureVector> extract_features(const Document& doc, FeatureIndex& index) {
  std::vector<TokenFeatureVector> out;
  std::size_t n_tokens = doc.token_count();
  out.reserve(n_tokens);
  static const std::array<const char*, 4> kBucketName = {"half=", "third=", "fourth=",
                                                         "fifth="};
  std::string buf;
  for (std::size_t j = 0; j < n_tokens; ++j) {
    const TUnit& u = doc.tunits[2 * j];
    TokenFeatureVector fv;
    fv.push_back(index.intern("w=" + u.text));
    fv.push_back(index.intern("stem=" + (u.stem ? *u.stem : default_stem(u.text))));
    if (u.pos) fv.push_back(index.intern("pos=" + *u.pos));
    std::size_t len = u.text.size();
    for (std::size_t n = 1; n <= 4 && n <= len; ++n) {
      buf = "p";
      buf += static_cast<char>('0' + n);
      buf += '=';
      buf.append(u.text, 0, n);
      fv.push_back(index.intern(buf));
      buf = "s";
      buf += static_cast<char>('0' + n);
      buf += '=';
      buf.append(u.text, len - n, n);
      fv.push_back(index.intern(buf));
    }
    fv.push_back(index.intern(std::string("shape=") + shape_name(token_shape(u.text))));
    for (int k = 2; k <= 5; ++k) {
      fv.push_back(index.intern(kBucketName[k - 2] +
                                std::to_string(position_bucket(j, n_tokens, k))));
    }
    std::sort(fv.begin(), fv.end());
    fv.erase(std::unique(fv.begin(), fv.end()), fv.end());
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace tagnoise
