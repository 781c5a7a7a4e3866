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

#include <iosfwd>
#include <map>
#include <string>

#include "tagnoise/features.hpp"
#include "tagnoise/tagger.hpp"

namespace tagnoise {

/// A bundle of per-concept taggers sharing one frozen feature index;
/// what `train` writes and `eval` loads.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  std::string learner;  ///< "crf" or "perceptron"
  FeatureIndex index;
  std::map<std::string, TaggerWeights> per_concept;
  std::map<std::string, std::string> metadata;  ///< config echo, seed, ...
};

/// Versioned JSON model dump. Weights round-trip exactly (doubles are
/// serialized losslessly); zero emission rows are omitted.
void save_model(const ModelBundle& model, std::ostream& out);
void save_model_file(const ModelBundle& model, const std::string& path);
ModelBundle load_model(std::istream& in);
ModelBundle load_model_file(const std::string& path);

}  // namespace tagnoise
