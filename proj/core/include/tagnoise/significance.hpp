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

#include "tagnoise/eval.hpp"

namespace tagnoise {

enum class ArtMetric { Micro, Macro };

ArtMetric art_metric_from_name(const std::string& name);
const char* art_metric_name(ArtMetric m);

/// Input to the paired approximate randomization test: per-document
/// per-concept tables for two systems over the same document set.
struct ArtInput {
  DocTables system_a;
  DocTables system_b;
  int shuffles = 9999;  ///< R
  std::uint64_t seed = 1;

  void validate() const;
};

struct ArtResult {
  double observed_delta = 0.0;  ///< |F1(A) - F1(B)| on the chosen metric
  double f1_a = 0.0;
  double f1_b = 0.0;
  double p_value = 1.0;         ///< (#{|delta*| >= |delta|} + 1) / (R + 1)
  int shuffles = 0;
  std::uint64_t seed = 0;
  ArtMetric metric = ArtMetric::Micro;
  bool significant = false;     ///< p < 0.05
};

/// Two-sided paired test: each shuffle swaps every document's (A, B) table
/// pair independently with probability 1/2 and recomputes the aggregate F1
/// difference from the pooled tables (never from per-document scores).
/// Deterministic given the seed; p is invariant under relabelling A and B.
ArtResult art_test(const ArtInput& input, ArtMetric metric);

std::string art_result_json(const ArtResult& result);

}  // namespace tagnoise
