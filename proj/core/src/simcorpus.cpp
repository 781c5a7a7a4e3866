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

#include "tagnoise/simcorpus.hpp"

#include <algorithm>
#include <cmath>

#include "tagnoise/eval.hpp"
#include "tagnoise/rng.hpp"

namespace tagnoise {

void GenConfig::validate() const {
  if (documents < 1) throw Error("GenConfig: documents must be >= 1");
  if (concepts < 1) throw Error("GenConfig: concepts must be >= 1");
  if (tokens_min < 1 || tokens_max < tokens_min) throw Error("GenConfig: bad token range");
  if (mention_rate < 0.0) throw Error("GenConfig: mention_rate must be >= 0");
  if (mention_len_mean < 1.0) throw Error("GenConfig: mention_len_mean must be >= 1");
  if (cue_density < 0.0 || cue_density > 1.0) throw Error("GenConfig: bad cue_density");
  if (cue_vocab_per_concept < 1 || background_vocab < 1)
    throw Error("GenConfig: vocabulary sizes must be >= 1");
  // Expected mention footprint (tokens plus one-token gaps) must leave room
  // in an average document, otherwise mention statistics cannot be honored.
  double footprint =
      static_cast<double>(concepts) * mention_rate * (mention_len_mean + 1.0);
  double mean_tokens = 0.5 * (tokens_min + tokens_max);
  if (footprint > 0.9 * mean_tokens)
    throw Error("GenConfig: infeasible: expected mention footprint " +
                std::to_string(footprint) + " exceeds 90% of mean document length " +
                std::to_string(mean_tokens));
}

bool CoderProfile::is_identity() const {
  return mention_drop_prob == 0.0 && spurious_mention_rate == 0.0 &&
         boundary_extend_mean == 0.0 && boundary_extend_sd == 0.0 &&
         mention_rate_multiplier == 1.0;
}

void CoderProfile::validate() const {
  if (mention_drop_prob < 0.0 || mention_drop_prob > 1.0)
    throw Error("CoderProfile: mention_drop_prob must be in [0, 1]");
  if (spurious_mention_rate < 0.0)
    throw Error("CoderProfile: spurious_mention_rate must be >= 0");
  if (boundary_extend_sd < 0.0) throw Error("CoderProfile: boundary_extend_sd must be >= 0");
  if (mention_rate_multiplier < 0.0)
    throw Error("CoderProfile: mention_rate_multiplier must be >= 0");
}

CoderProfile CoderProfile::scaled(double s) const {
  if (s < 0.0) throw Error("CoderProfile: noise scale must be >= 0");
  CoderProfile p;
  p.mention_drop_prob = std::min(1.0, mention_drop_prob * s);
  p.spurious_mention_rate = spurious_mention_rate * s;
  p.boundary_extend_mean = boundary_extend_mean * s;
  p.boundary_extend_sd = boundary_extend_sd * s;
  p.mention_rate_multiplier = 1.0 + (mention_rate_multiplier - 1.0) * s;
  return p;
}

namespace {

std::string background_word(std::size_t i) { return "bg" + std::to_string(i); }

std::string cue_word(int concept_idx, std::size_t i) {
  return "cue" + std::to_string(concept_idx) + "x" + std::to_string(i);
}

std::string separator_text(Rng& rng) {
  double u = rng.real01();
  if (u < 0.90) return " ";
  if (u < 0.97) return ", ";
  return ". ";
}

struct PlannedMention {
  int concept_idx;
  int length;  // tokens
};

}  // namespace

AnnotatedCorpus generate_corpus(const GenConfig& config) {
  config.validate();
  AnnotatedCorpus corpus;
  for (int c = 0; c < config.concepts; ++c)
    corpus.concept_set.concepts.push_back("c" + std::to_string(c + 1));

  Rng rng(derive_seed(config.seed, "gen"));
  for (int d = 0; d < config.documents; ++d) {
    int n_tokens = static_cast<int>(rng.uniform_int(config.tokens_min, config.tokens_max));

    // Plan mention counts and lengths per concept, then trim until the
    // total footprint fits.
    std::vector<PlannedMention> mentions;
    for (int c = 0; c < config.concepts; ++c) {
      std::uint64_t count = rng.poisson(config.mention_rate);
      for (std::uint64_t k = 0; k < count; ++k) {
        int len = 1 + static_cast<int>(rng.poisson(config.mention_len_mean - 1.0));
        mentions.push_back({c, len});
      }
    }
    rng.shuffle(mentions);
    auto footprint = [&]() {
      int f = 0;
      for (const auto& m : mentions) f += m.length;
      if (!mentions.empty()) f += static_cast<int>(mentions.size()) - 1;  // 1-token gaps
      return f;
    };
    while (!mentions.empty() && footprint() > n_tokens) mentions.pop_back();

    // Distribute the free tokens into the gaps around mentions.
    int free_tokens = n_tokens - footprint();
    std::size_t n_slots = mentions.size() + 1;
    std::vector<int> slack(n_slots, 0);
    for (int k = 0; k < free_tokens; ++k)
      ++slack[static_cast<std::size_t>(rng.below(n_slots))];

    Document doc;
    doc.id = "d" + std::to_string(d + 1);
    ConceptAnnotations gold;
    for (const auto& c : corpus.concept_set.concepts) gold[c];

    int token_ordinal = 0;
    auto push_token = [&](const std::string& text) {
      if (token_ordinal > 0)
        doc.tunits.push_back({TUnitKind::Separator, separator_text(rng), {}, {}});
      doc.tunits.push_back({TUnitKind::Token, text, {}, {}});
      ++token_ordinal;
    };
    auto push_background = [&](int count) {
      for (int k = 0; k < count; ++k)
        push_token(background_word(rng.below(static_cast<std::uint64_t>(config.background_vocab))));
    };

    for (std::size_t m = 0; m <= mentions.size(); ++m) {
      push_background(slack[m]);
      if (m == mentions.size()) break;
      if (m > 0) push_background(1);  // mandatory gap between mentions
      const PlannedMention& pm = mentions[m];
      int start_index = 2 * token_ordinal;
      for (int k = 0; k < pm.length; ++k) {
        bool use_cue = (k == 0) || rng.bernoulli(config.cue_density);
        if (use_cue)
          push_token(cue_word(pm.concept_idx,
                              rng.below(static_cast<std::uint64_t>(config.cue_vocab_per_concept))));
        else
          push_background(1);
      }
      int end_index = 2 * (token_ordinal - 1);
      gold[corpus.concept_set.concepts[static_cast<std::size_t>(pm.concept_idx)]].push_back(
          {start_index, end_index});
    }
    if (token_ordinal == 0) push_background(1);  // documents cannot be empty

    for (auto& [concept_id, spans] : gold) std::sort(spans.begin(), spans.end());
    corpus.annotations["gold"][doc.id] = std::move(gold);
    corpus.documents.push_back(std::move(doc));
  }
  corpus.validate();
  return corpus;
}

namespace {

// Clips a tentative token-index range so the span stays inside the document
// and clear of its neighbours, then converts to t-unit indices. Returns
// {1, 0} (start > end) when no room is left.
MentionSpan clip_span(int start_tok, int end_tok, int prev_end_tunit, int next_start_tunit,
                      int n_tokens) {
  int min_start = std::max(prev_end_tunit + 2, 0);
  int max_end = std::min(next_start_tunit - 2, 2 * (n_tokens - 1));
  if (min_start > max_end) return {1, 0};
  int start = std::max(2 * std::max(start_tok, 0), min_start);
  int end = std::min(2 * std::min(end_tok, n_tokens - 1), max_end);
  if (start > end) {  // shrunk away; keep a single token near the middle
    int mid = (start + end) / 2;
    mid -= mid % 2;
    if (mid < min_start) mid = min_start;
    if (mid > max_end) mid = max_end;
    start = end = mid;
  }
  return {start, end};
}

}  // namespace

AnnotationSet apply_coder(const AnnotatedCorpus& corpus, const std::string& gold_coder,
                          const CoderProfile& profile, std::uint64_t seed) {
  profile.validate();
  auto git = corpus.annotations.find(gold_coder);
  if (git == corpus.annotations.end())
    throw Error("apply_coder: unknown coder '" + gold_coder + "'");

  // Mean gold mention length drives the length of spawned mentions.
  double mean_len = 1.0;
  {
    long long toks = 0, ments = 0;
    for (const auto& [doc_id, per_concept] : git->second)
      for (const auto& [concept_id, spans] : per_concept)
        for (const MentionSpan& s : spans) {
          toks += s.token_length();
          ++ments;
        }
    if (ments > 0) mean_len = static_cast<double>(toks) / static_cast<double>(ments);
  }

  AnnotationSet out;
  for (const auto& [doc_id, per_concept] : git->second) {
    const Document& doc = corpus.doc(doc_id);
    int n_tokens = static_cast<int>(doc.token_count());
    int last_tunit = static_cast<int>(doc.size()) - 1;
    Rng rng(derive_seed(derive_seed(seed, "coder-doc"), doc_id));
    ConceptAnnotations derived;
    for (const auto& [concept_id, gold_spans] : per_concept) {
      SpanList spans;
      // Pass 1: drop and extend/shrink the gold spans.
      for (std::size_t i = 0; i < gold_spans.size(); ++i) {
        // Draws happen for every span regardless of outcome, so a given
        // span sees the same randomness as the profile scales.
        bool drop = rng.bernoulli(profile.mention_drop_prob);
        int dl = 0, dr = 0;
        if (profile.boundary_extend_mean != 0.0 || profile.boundary_extend_sd != 0.0) {
          dl = static_cast<int>(std::llround(
              rng.normal(profile.boundary_extend_mean, profile.boundary_extend_sd)));
          dr = static_cast<int>(std::llround(
              rng.normal(profile.boundary_extend_mean, profile.boundary_extend_sd)));
        }
        if (drop) continue;
        const MentionSpan& g = gold_spans[i];
        int prev_end = spans.empty() ? -2 : spans.back().end;
        int next_start = (i + 1 < gold_spans.size()) ? gold_spans[i + 1].start
                                                     : last_tunit + 2;
        MentionSpan s = clip_span(g.start / 2 - dl, g.end / 2 + dr, prev_end, next_start,
                                  n_tokens);
        if (s.start > s.end) continue;  // no room left at all
        spans.push_back(s);
      }
      // Pass 2: spawn extra mentions (rate multiplier and spurious rate).
      double extra_rate =
          static_cast<double>(gold_spans.size()) *
              std::max(0.0, profile.mention_rate_multiplier - 1.0) +
          profile.spurious_mention_rate;
      std::uint64_t n_extra = rng.poisson(extra_rate);
      for (std::uint64_t k = 0; k < n_extra; ++k) {
        int want_len = 1 + static_cast<int>(rng.poisson(
                               std::max(0.0, mean_len - 1.0 +
                                                 2.0 * profile.boundary_extend_mean)));
        if (want_len > n_tokens) want_len = n_tokens;
        bool placed = false;
        for (int attempt = 0; attempt < 10 && !placed; ++attempt) {
          int start_tok = static_cast<int>(
              rng.below(static_cast<std::uint64_t>(n_tokens - want_len + 1)));
          int end_tok = start_tok + want_len - 1;
          MentionSpan cand{2 * start_tok, 2 * end_tok};
          // Must stay clear of every existing span (one unlabeled t-unit).
          bool ok = true;
          for (const MentionSpan& s : spans) {
            if (cand.start <= s.end && s.start <= cand.end) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          spans.push_back(cand);
          std::sort(spans.begin(), spans.end());
          placed = true;
        }
      }
      // Under a multiplier < 1, thin the surviving spans proportionally.
      if (profile.mention_rate_multiplier < 1.0) {
        SpanList kept;
        for (const MentionSpan& s : spans)
          if (!rng.bernoulli(1.0 - profile.mention_rate_multiplier)) kept.push_back(s);
        spans = std::move(kept);
      }
      derived[concept_id] = std::move(spans);
    }
    out[doc_id] = std::move(derived);
  }
  return out;
}

CalibrationResult calibrate_to_kappa(const AnnotatedCorpus& corpus,
                                     const std::string& gold_coder, const CoderProfile& base,
                                     double target_kappa, double tolerance,
                                     std::uint64_t seed) {
  if (!(target_kappa > 0.0 && target_kappa < 1.0) && target_kappa != 1.0)
    throw Error("calibrate_to_kappa: target must be in (0, 1]");
  if (!(tolerance > 0.0)) throw Error("calibrate_to_kappa: tolerance must be > 0");
  base.validate();

  std::vector<const Document*> docs;
  for (const Document& d : corpus.documents) docs.push_back(&d);
  const AnnotationSet& gold = corpus.annotations.at(gold_coder);

  auto kappa_at = [&](double s) {
    AnnotationSet derived = apply_coder(corpus, gold_coder, base.scaled(s), seed);
    return pooled_kappa_sets(docs, gold, derived, corpus.concept_set.concepts).kappa;
  };

  CalibrationResult res;
  if (target_kappa == 1.0) {
    res.profile = base.scaled(0.0);
    res.noise_scale = 0.0;
    res.achieved_kappa = 1.0;
    return res;
  }
  if (base.is_identity())
    throw Error("calibrate_to_kappa: identity base profile cannot reach kappa < 1");

  double lo = 0.0, hi = 1.0;
  double kappa_hi = kappa_at(hi);
  int expansions = 0;
  while (kappa_hi > target_kappa && expansions < 8) {
    lo = hi;
    hi *= 2.0;
    kappa_hi = kappa_at(hi);
    ++expansions;
  }
  if (kappa_hi > target_kappa)
    throw Error("calibrate_to_kappa: target " + std::to_string(target_kappa) +
                " unreachable; kappa at scale " + std::to_string(hi) + " is " +
                std::to_string(kappa_hi));

  double best_s = hi, best_kappa = kappa_hi;
  int steps = 0;
  while (std::abs(best_kappa - target_kappa) > tolerance && steps < 40) {
    double mid = 0.5 * (lo + hi);
    double k = kappa_at(mid);
    ++steps;
    if (std::abs(k - target_kappa) < std::abs(best_kappa - target_kappa)) {
      best_kappa = k;
      best_s = mid;
    }
    if (k > target_kappa)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(best_kappa - target_kappa) > tolerance)
    throw Error("calibrate_to_kappa: bisection did not reach target " +
                std::to_string(target_kappa) + " within tolerance (bracket [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "], best " +
                std::to_string(best_kappa) + ")");
  res.profile = base.scaled(best_s);
  res.noise_scale = best_s;
  res.achieved_kappa = best_kappa;
  res.bisection_steps = steps;
  return res;
}

}  // namespace tagnoise
