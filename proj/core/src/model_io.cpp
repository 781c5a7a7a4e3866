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

#include "tagnoise/model_io.hpp"

#include <fstream>

#include "json.hpp"

namespace tagnoise {

using nlohmann::json;

void save_model(const ModelBundle& model, std::ostream& out) {
  json j;
  j["format"] = "tagnoise-model";
  j["version"] = ModelBundle::kFormatVersion;
  j["learner"] = model.learner;
  j["features"] = model.index.names();
  for (const auto& [k, v] : model.metadata) j["metadata"][k] = v;
  json concepts = json::object();
  for (const auto& [concept_id, w] : model.per_concept) {
    json jw;
    jw["transition"] = w.transition;
    json emission = json::object();
    for (std::size_t f = 0; f < w.feature_count(); ++f) {
      const double* row = &w.emission[f * kNumLabels];
      if (row[0] == 0.0 && row[1] == 0.0 && row[2] == 0.0) continue;
      emission[std::to_string(f)] = {row[0], row[1], row[2]};
    }
    jw["emission"] = std::move(emission);
    concepts[concept_id] = std::move(jw);
  }
  j["concepts"] = std::move(concepts);
  out << j.dump() << '\n';
}

void save_model_file(const ModelBundle& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  save_model(model, out);
  if (!out) throw Error("I/O error while writing '" + path + "'");
}

ModelBundle load_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "tagnoise-model")
    throw Error("not a tagnoise model file");
  int version = j.value("version", -1);
  if (version != ModelBundle::kFormatVersion)
    throw Error("unsupported model format version " + std::to_string(version));

  ModelBundle model;
  model.learner = j.value("learner", "crf");
  model.index = FeatureIndex::from_names(j.at("features").get<std::vector<std::string>>());
  if (j.contains("metadata"))
    for (const auto& [k, v] : j.at("metadata").items())
      model.metadata[k] = v.get<std::string>();

  for (const auto& [concept_id, jw] : j.at("concepts").items()) {
    TaggerWeights w(model.index.size());
    auto trans = jw.at("transition").get<std::vector<double>>();
    if (trans.size() != 9) throw Error("model concept '" + concept_id + "': bad transition size");
    std::copy(trans.begin(), trans.end(), w.transition.begin());
    for (const auto& [fid_str, row] : jw.at("emission").items()) {
      std::size_t f = 0;
      try {
        f = std::stoull(fid_str);
      } catch (const std::exception&) {
        throw Error("model concept '" + concept_id + "': bad feature id '" + fid_str + "'");
      }
      if (f >= model.index.size())
        throw Error("model concept '" + concept_id + "': feature id " + fid_str +
                    " outside the index");
      auto vals = row.get<std::vector<double>>();
      if (vals.size() != kNumLabels)
        throw Error("model concept '" + concept_id + "': bad emission row size");
      for (std::size_t y = 0; y < kNumLabels; ++y) w.emission[f * kNumLabels + y] = vals[y];
    }
    model.per_concept[concept_id] = std::move(w);
  }
  return model;
}

ModelBundle load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path + "'");
  try {
    return load_model(in);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace tagnoise
