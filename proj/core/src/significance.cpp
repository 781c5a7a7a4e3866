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

#include "tagnoise/significance.hpp"

#include <cmath>
#include <set>

#include "json.hpp"
#include "tagnoise/rng.hpp"

namespace tagnoise {

ArtMetric art_metric_from_name(const std::string& name) {
  if (name == "micro") return ArtMetric::Micro;
  if (name == "macro") return ArtMetric::Macro;
  throw Error("unknown ART metric '" + name + "' (expected 'micro' or 'macro')");
}

const char* art_metric_name(ArtMetric m) {
  return m == ArtMetric::Micro ? "micro" : "macro";
}

void ArtInput::validate() const {
  if (shuffles < 1) throw Error("ArtInput: shuffle count must be >= 1");
  if (system_a.tables.empty()) throw Error("ArtInput: empty document set");
  if (system_a.tables.size() != system_b.tables.size())
    throw Error("ArtInput: document sets differ in size");
  auto ai = system_a.tables.begin();
  auto bi = system_b.tables.begin();
  for (; ai != system_a.tables.end(); ++ai, ++bi) {
    if (ai->first != bi->first)
      throw Error("ArtInput: document sets differ ('" + ai->first + "' vs '" + bi->first +
                  "')");
    if (ai->second.size() != bi->second.size())
      throw Error("ArtInput: concept sets differ for document '" + ai->first + "'");
    auto ak = ai->second.begin();
    auto bk = bi->second.begin();
    for (; ak != ai->second.end(); ++ak, ++bk)
      if (ak->first != bk->first)
        throw Error("ArtInput: concept sets differ for document '" + ai->first + "'");
  }
}

namespace {

struct DocPair {
  std::vector<ContingencyTable> a;  // per concept, in fixed concept order
  std::vector<ContingencyTable> b;
};

double aggregate_f1(const std::vector<ContingencyTable>& per_concept, ArtMetric metric) {
  if (metric == ArtMetric::Micro) {
    ContingencyTable pooled;
    for (const auto& t : per_concept) pooled += t;
    return f1(pooled);
  }
  double sum = 0.0;
  for (const auto& t : per_concept) sum += f1(t);
  return sum / static_cast<double>(per_concept.size());
}

}  // namespace

ArtResult art_test(const ArtInput& input, ArtMetric metric) {
  input.validate();

  // Flatten into per-document table vectors over a shared concept order.
  std::set<std::string> concept_names;
  for (const auto& [doc, concepts] : input.system_a.tables)
    for (const auto& [c, _] : concepts) concept_names.insert(c);
  if (concept_names.empty()) throw Error("art_test: no concepts in the input tables");
  std::vector<std::string> concepts(concept_names.begin(), concept_names.end());

  std::vector<DocPair> docs;
  docs.reserve(input.system_a.tables.size());
  auto bi = input.system_b.tables.begin();
  for (auto ai = input.system_a.tables.begin(); ai != input.system_a.tables.end();
       ++ai, ++bi) {
    DocPair p;
    for (const auto& c : concepts) {
      auto fa = ai->second.find(c);
      auto fb = bi->second.find(c);
      p.a.push_back(fa == ai->second.end() ? ContingencyTable{} : fa->second);
      p.b.push_back(fb == bi->second.end() ? ContingencyTable{} : fb->second);
    }
    docs.push_back(std::move(p));
  }

  std::size_t m = concepts.size();
  auto scores = [&](const std::vector<bool>& swapped) {
    std::vector<ContingencyTable> agg_a(m), agg_b(m);
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto& a = swapped[d] ? docs[d].b : docs[d].a;
      const auto& b = swapped[d] ? docs[d].a : docs[d].b;
      for (std::size_t c = 0; c < m; ++c) {
        agg_a[c] += a[c];
        agg_b[c] += b[c];
      }
    }
    return std::pair<double, double>(aggregate_f1(agg_a, metric),
                                     aggregate_f1(agg_b, metric));
  };

  std::vector<bool> identity(docs.size(), false);
  auto [fa, fb] = scores(identity);
  double observed = std::abs(fa - fb);

  Rng rng(derive_seed(input.seed, "art"));
  long long exceed = 0;
  std::vector<bool> swapped(docs.size());
  for (int r = 0; r < input.shuffles; ++r) {
    for (std::size_t d = 0; d < docs.size(); ++d) swapped[d] = rng.bernoulli(0.5);
    auto [sa, sb] = scores(swapped);
    if (std::abs(sa - sb) >= observed) ++exceed;
  }

  ArtResult res;
  res.observed_delta = observed;
  res.f1_a = fa;
  res.f1_b = fb;
  res.p_value = static_cast<double>(exceed + 1) / static_cast<double>(input.shuffles + 1);
  res.shuffles = input.shuffles;
  res.seed = input.seed;
  res.metric = metric;
  res.significant = res.p_value < 0.05;
  return res;
}

std::string art_result_json(const ArtResult& result) {
  nlohmann::json j;
  j["metric"] = art_metric_name(result.metric);
  j["f1_a"] = result.f1_a;
  j["f1_b"] = result.f1_b;
  j["observed_delta"] = result.observed_delta;
  j["p_value"] = result.p_value;
  j["shuffles"] = result.shuffles;
  j["seed"] = result.seed;
  j["significant"] = result.significant;
  return j.dump(2);
}

}  // namespace tagnoise
