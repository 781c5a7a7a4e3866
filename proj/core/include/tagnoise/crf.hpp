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

/// Linear-chain CRF training configuration.
struct TrainConfig {
  enum class Optimizer { Lbfgs, GradientDescent };

  double l2_sigma = 10.0;       ///< Gaussian prior std; prior = ||w||^2 / (2 sigma^2)
  int max_iterations = 200;
  /// Stop when the per-step NLL improvement drops below
  /// nll_rel_tol * max(1, T * ln 3), i.e. relative to the zero-weight
  /// model's NLL over the T training tokens (the problem's natural scale).
  double nll_rel_tol = 1e-5;
  double initial_step = 1.0;    ///< line-search schedule
  double backtrack_factor = 0.5;
  double armijo_c = 1e-4;
  int lbfgs_history = 15;
  Optimizer optimizer = Optimizer::Lbfgs;
  std::uint64_t seed = 0;       ///< recorded for provenance; training is deterministic

  void validate() const;
};

/// A trained per-concept binary CRF tagger over {B, I, O}.
struct CrfModel {
  TaggerWeights weights;
  double final_nll = 0.0;
  int iterations = 0;
  std::vector<double> nll_trace;  ///< NLL after each accepted step
};

/// Posterior quantities from the forward-backward recursions (computed over
/// the full 3^T sequence space; decoding constraints do not apply here).
struct CrfMarginals {
  double log_z = 0.0;
  std::vector<double> node;  ///< [t * 3 + y]
  std::vector<double> edge;  ///< [(t-1) * 9 + prev * 3 + next], for t >= 1
};

/// Scaled forward-backward over one instance. log_z is finite for finite
/// weights; node marginals sum to 1 at every position.
CrfMarginals forward_backward(const TaggerWeights& w,
                              const std::vector<TokenFeatureVector>& features);

/// Regularized negative log-likelihood and its gradient over a training set:
///   NLL  = -sum_i log p(y_i | x_i) + ||w||^2 / (2 sigma^2)
///   grad = (expected - empirical feature counts) + w / sigma^2
/// Gradient layout matches TaggerWeights: emission block then the 9
/// transition weights.
double nll_gradient(const TaggerWeights& w, const std::vector<TaggedInstance>& instances,
                    double l2_sigma, std::vector<double>& grad);

/// NLL only (no gradient); used by the line search.
double nll_value(const TaggerWeights& w, const std::vector<TaggedInstance>& instances,
                 double l2_sigma);

/// Trains a CRF by penalized maximum likelihood. Deterministic given the
/// config; NLL is non-increasing across accepted steps. Throws on invalid
/// gold tags or non-finite objectives.
CrfModel train_crf(const std::vector<TaggedInstance>& instances, std::size_t feature_count,
                   const TrainConfig& config);

}  // namespace tagnoise
