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

#include "tagnoise/crf.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace tagnoise {

void TrainConfig::validate() const {
  if (!(l2_sigma > 0.0)) throw Error("TrainConfig: l2_sigma must be > 0");
  if (max_iterations < 1) throw Error("TrainConfig: max_iterations must be >= 1");
  if (!(nll_rel_tol >= 0.0)) throw Error("TrainConfig: nll_rel_tol must be >= 0");
  if (!(initial_step > 0.0) || !(backtrack_factor > 0.0) || backtrack_factor >= 1.0)
    throw Error("TrainConfig: invalid line-search schedule");
}

namespace {

constexpr std::size_t L = kNumLabels;

// Reusable buffers for the per-instance recursions.
struct Workspace {
  std::vector<double> emit;    // [t*3+y] raw emission scores
  std::vector<double> psi;     // [t*3+y] exp(emit - per-position max)
  std::vector<double> shift;   // [t]     per-position max
  std::vector<double> alpha;   // [t*3+y] scaled forward
  std::vector<double> beta;    // [t*3+y] scaled backward
  std::vector<double> scale;   // [t]
};

// Scaled forward pass; returns log Z. Fills psi/shift/alpha/scale.
//
// The per-position max is subtracted before exponentiating, so the max
// label's psi is exactly 1 and needs no exp. Scale factors are folded into
// log Z in chunks (frexp keeps the running product in range), which trades
// one log per position for one log per chunk.
double forward_pass(const TaggerWeights& w, const std::vector<TokenFeatureVector>& features,
                    Workspace& ws) {
  std::size_t T = features.size();
  emission_scores(w, features, ws.emit);
  ws.psi.resize(T * L);
  ws.shift.resize(T);
  ws.alpha.resize(T * L);
  ws.scale.resize(T);

  double exp_t[9];
  for (std::size_t k = 0; k < 9; ++k) exp_t[k] = std::exp(w.transition[k]);

  double shift_sum = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double* e = &ws.emit[t * L];
    std::size_t arg = 0;
    if (e[1] > e[arg]) arg = 1;
    if (e[2] > e[arg]) arg = 2;
    double m = e[arg];
    ws.shift[t] = m;
    shift_sum += m;
    double* p = &ws.psi[t * L];
    p[0] = arg == 0 ? 1.0 : std::exp(e[0] - m);
    p[1] = arg == 1 ? 1.0 : std::exp(e[1] - m);
    p[2] = arg == 2 ? 1.0 : std::exp(e[2] - m);
  }

  double log_z = shift_sum;
  double prod = 1.0;
  long exp2_acc = 0;
  int pending = 0;
  auto fold = [&](double c) {
    prod *= c;
    if (++pending == 24) {
      int e2 = 0;
      prod = std::frexp(prod, &e2);
      exp2_acc += e2;
      pending = 0;
    }
  };
  {
    double a0 = ws.psi[0], a1 = ws.psi[1], a2 = ws.psi[2];
    double c = a0 + a1 + a2;
    ws.alpha[0] = a0 / c;
    ws.alpha[1] = a1 / c;
    ws.alpha[2] = a2 / c;
    ws.scale[0] = c;
    fold(c);
  }
  for (std::size_t t = 1; t < T; ++t) {
    const double* ap = &ws.alpha[(t - 1) * L];
    double* a = &ws.alpha[t * L];
    const double* p = &ws.psi[t * L];
    for (std::size_t y = 0; y < L; ++y) {
      a[y] = p[y] * (ap[0] * exp_t[0 * 3 + y] + ap[1] * exp_t[1 * 3 + y] +
                     ap[2] * exp_t[2 * 3 + y]);
    }
    double c = a[0] + a[1] + a[2];
    a[0] /= c;
    a[1] /= c;
    a[2] /= c;
    ws.scale[t] = c;
    fold(c);
  }
  log_z += std::log(prod) + static_cast<double>(exp2_acc) * 0.6931471805599453;
  return log_z;
}

// Scaled backward pass; afterwards node marginal = alpha * beta.
void backward_pass(const TaggerWeights& w, std::size_t T, Workspace& ws) {
  ws.beta.resize(T * L);
  double exp_t[9];
  for (std::size_t k = 0; k < 9; ++k) exp_t[k] = std::exp(w.transition[k]);

  ws.beta[(T - 1) * L + 0] = 1.0;
  ws.beta[(T - 1) * L + 1] = 1.0;
  ws.beta[(T - 1) * L + 2] = 1.0;
  for (std::size_t t = T - 1; t-- > 0;) {
    const double* bn = &ws.beta[(t + 1) * L];
    const double* pn = &ws.psi[(t + 1) * L];
    double* b = &ws.beta[t * L];
    double c = ws.scale[t + 1];
    for (std::size_t p = 0; p < L; ++p) {
      b[p] = (exp_t[p * 3 + 0] * pn[0] * bn[0] + exp_t[p * 3 + 1] * pn[1] * bn[1] +
              exp_t[p * 3 + 2] * pn[2] * bn[2]) /
             c;
    }
  }
}

void validate_gold(const TaggedInstance& inst, std::size_t idx) {
  if (inst.gold.size() != inst.features.size())
    throw Error("instance " + std::to_string(idx) + ": gold tag count mismatch");
  for (std::size_t t = 0; t < inst.gold.size(); ++t) {
    if (inst.gold[t] == IobTag::I) {
      if (t == 0)
        throw Error("instance " + std::to_string(idx) + ": gold tags start with I");
      if (inst.gold[t - 1] == IobTag::O)
        throw Error("instance " + std::to_string(idx) + ": gold I follows O at token " +
                    std::to_string(t));
    }
  }
}

}  // namespace

CrfMarginals forward_backward(const TaggerWeights& w,
                              const std::vector<TokenFeatureVector>& features) {
  std::size_t T = features.size();
  if (T == 0) throw Error("forward_backward: empty instance");
  Workspace ws;
  CrfMarginals out;
  out.log_z = forward_pass(w, features, ws);
  backward_pass(w, T, ws);

  out.node.resize(T * L);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t y = 0; y < L; ++y)
      out.node[t * L + y] = ws.alpha[t * L + y] * ws.beta[t * L + y];

  if (T > 1) {
    out.edge.assign((T - 1) * 9, 0.0);
    double exp_t[9];
    for (std::size_t k = 0; k < 9; ++k) exp_t[k] = std::exp(w.transition[k]);
    for (std::size_t t = 1; t < T; ++t) {
      const double* ap = &ws.alpha[(t - 1) * L];
      const double* pn = &ws.psi[t * L];
      const double* bn = &ws.beta[t * L];
      double c = ws.scale[t];
      double* e = &out.edge[(t - 1) * 9];
      for (std::size_t p = 0; p < L; ++p)
        for (std::size_t y = 0; y < L; ++y)
          e[p * 3 + y] = ap[p] * exp_t[p * 3 + y] * pn[y] * bn[y] / c;
    }
  }
  return out;
}

double nll_value(const TaggerWeights& w, const std::vector<TaggedInstance>& instances,
                 double l2_sigma) {
  Workspace ws;
  double nll = 0.0;
  for (const TaggedInstance& inst : instances) {
    double log_z = forward_pass(w, inst.features, ws);
    nll += log_z - sequence_score(w, inst.features, inst.gold);
  }
  double prior = 0.0;
  for (double v : w.emission) prior += v * v;
  for (double v : w.transition) prior += v * v;
  nll += prior / (2.0 * l2_sigma * l2_sigma);
  return nll;
}

double nll_gradient(const TaggerWeights& w, const std::vector<TaggedInstance>& instances,
                    double l2_sigma, std::vector<double>& grad) {
  std::size_t n_emit = w.emission.size();
  grad.assign(n_emit + 9, 0.0);
  Workspace ws;
  double nll = 0.0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const TaggedInstance& inst = instances[i];
    validate_gold(inst, i);
    std::size_t T = inst.features.size();
    double log_z = forward_pass(w, inst.features, ws);
    backward_pass(w, T, ws);
    nll += log_z - sequence_score(w, inst.features, inst.gold);

    double exp_t[9];
    for (std::size_t k = 0; k < 9; ++k) exp_t[k] = std::exp(w.transition[k]);

    for (std::size_t t = 0; t < T; ++t) {
      const double* a = &ws.alpha[t * L];
      const double* b = &ws.beta[t * L];
      double mu[3] = {a[0] * b[0], a[1] * b[1], a[2] * b[2]};
      std::size_t gold_y = static_cast<std::size_t>(inst.gold[t]);
      // Expected minus empirical emission counts.
      for (FeatureId f : inst.features[t]) {
        double* g = &grad[static_cast<std::size_t>(f) * L];
        g[0] += mu[0];
        g[1] += mu[1];
        g[2] += mu[2];
        g[gold_y] -= 1.0;
      }
      if (t > 0) {
        const double* ap = &ws.alpha[(t - 1) * L];
        const double* pn = &ws.psi[t * L];
        double c = ws.scale[t];
        for (std::size_t p = 0; p < L; ++p)
          for (std::size_t y = 0; y < L; ++y)
            grad[n_emit + p * 3 + y] += ap[p] * exp_t[p * 3 + y] * pn[y] * b[y] / c;
        grad[n_emit + static_cast<std::size_t>(inst.gold[t - 1]) * 3 + gold_y] -= 1.0;
      }
    }
  }
  double inv_var = 1.0 / (l2_sigma * l2_sigma);
  double prior = 0.0;
  for (std::size_t k = 0; k < n_emit; ++k) {
    prior += w.emission[k] * w.emission[k];
    grad[k] += w.emission[k] * inv_var;
  }
  for (std::size_t k = 0; k < 9; ++k) {
    prior += w.transition[k] * w.transition[k];
    grad[n_emit + k] += w.transition[k] * inv_var;
  }
  nll += prior * 0.5 * inv_var;
  return nll;
}

namespace {

void apply_step(const TaggerWeights& base, const std::vector<double>& dir, double step,
                TaggerWeights& out) {
  std::size_t n_emit = base.emission.size();
  out.emission.resize(n_emit);
  for (std::size_t k = 0; k < n_emit; ++k) out.emission[k] = base.emission[k] + step * dir[k];
  for (std::size_t k = 0; k < 9; ++k)
    out.transition[k] = base.transition[k] + step * dir[n_emit + k];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

CrfModel train_crf(const std::vector<TaggedInstance>& instances, std::size_t feature_count,
                   const TrainConfig& config) {
  config.validate();
  if (instances.empty()) throw Error("train_crf: no training instances");
  for (std::size_t i = 0; i < instances.size(); ++i) validate_gold(instances[i], i);

  CrfModel model;
  model.weights = TaggerWeights(feature_count);
  std::size_t dim = feature_count * kNumLabels + 9;

  std::size_t total_tokens = 0;
  for (const auto& inst : instances) total_tokens += inst.features.size();
  double nll_scale = std::max(1.0, static_cast<double>(total_tokens) * std::log(3.0));
  double stop_threshold = config.nll_rel_tol * nll_scale;

  std::vector<double> grad;
  double nll = nll_gradient(model.weights, instances, config.l2_sigma, grad);
  if (!std::isfinite(nll)) throw Error("train_crf: non-finite initial NLL");
  model.nll_trace.push_back(nll);

  TaggerWeights trial(feature_count);
  std::vector<double> dir(dim), trial_grad;

  // L-BFGS history (unused when running plain gradient descent).
  std::deque<std::vector<double>> s_hist, y_hist;
  std::vector<double> prev_w, prev_g;
  double prev_step = config.initial_step;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    if (config.optimizer == TrainConfig::Optimizer::Lbfgs && !s_hist.empty()) {
      // Two-loop recursion.
      std::copy(grad.begin(), grad.end(), dir.begin());
      std::size_t m = s_hist.size();
      std::vector<double> alpha_coeff(m);
      for (std::size_t j = m; j-- > 0;) {
        double rho = 1.0 / dot(y_hist[j], s_hist[j]);
        alpha_coeff[j] = rho * dot(s_hist[j], dir);
        for (std::size_t k = 0; k < dim; ++k) dir[k] -= alpha_coeff[j] * y_hist[j][k];
      }
      double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (std::size_t k = 0; k < dim; ++k) dir[k] *= gamma;
      for (std::size_t j = 0; j < m; ++j) {
        double rho = 1.0 / dot(y_hist[j], s_hist[j]);
        double beta = rho * dot(y_hist[j], dir);
        for (std::size_t k = 0; k < dim; ++k)
          dir[k] += (alpha_coeff[j] - beta) * s_hist[j][k];
      }
      for (std::size_t k = 0; k < dim; ++k) dir[k] = -dir[k];
      prev_step = 1.0;
    } else {
      for (std::size_t k = 0; k < dim; ++k) dir[k] = -grad[k];
      if (config.optimizer == TrainConfig::Optimizer::GradientDescent)
        prev_step = std::min(prev_step * 2.0, config.initial_step);
      else
        prev_step = config.initial_step;
    }

    double slope = dot(grad, dir);
    if (slope >= 0.0) break;  // no descent direction left: converged

    // Armijo backtracking. The first trial evaluates the full gradient so an
    // accepted first step needs no second pass; later trials use the cheap
    // value-only evaluation until one is accepted.
    double step = prev_step;
    double new_nll = 0.0;
    bool accepted = false;
    bool have_trial_grad = false;
    for (int ls = 0; ls < 60; ++ls) {
      apply_step(model.weights, dir, step, trial);
      double f;
      if (ls == 0) {
        f = nll_gradient(trial, instances, config.l2_sigma, trial_grad);
        have_trial_grad = true;
      } else {
        f = nll_value(trial, instances, config.l2_sigma);
        have_trial_grad = false;
      }
      if (std::isfinite(f) && f <= nll + config.armijo_c * step * slope) {
        new_nll = f;
        accepted = true;
        break;
      }
      step *= config.backtrack_factor;
    }
    if (!accepted) break;  // converged to line-search resolution
    prev_step = step;

    if (config.optimizer == TrainConfig::Optimizer::Lbfgs) {
      prev_w.assign(model.weights.emission.begin(), model.weights.emission.end());
      prev_w.insert(prev_w.end(), model.weights.transition.begin(),
                    model.weights.transition.end());
      prev_g = grad;
    }

    std::swap(model.weights.emission, trial.emission);
    model.weights.transition = trial.transition;
    if (have_trial_grad)
      std::swap(grad, trial_grad);
    else
      new_nll = nll_gradient(model.weights, instances, config.l2_sigma, grad);
    if (!std::isfinite(new_nll)) throw Error("train_crf: non-finite NLL at iteration " +
                                             std::to_string(iter + 1));
    model.nll_trace.push_back(new_nll);
    model.iterations = iter + 1;

    if (config.optimizer == TrainConfig::Optimizer::Lbfgs) {
      std::vector<double> s(dim), y(dim);
      for (std::size_t k = 0; k < feature_count * kNumLabels; ++k)
        s[k] = model.weights.emission[k] - prev_w[k];
      for (std::size_t k = 0; k < 9; ++k)
        s[feature_count * kNumLabels + k] =
            model.weights.transition[k] - prev_w[feature_count * kNumLabels + k];
      for (std::size_t k = 0; k < dim; ++k) y[k] = grad[k] - prev_g[k];
      if (dot(s, y) > 1e-12) {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(y));
        if (s_hist.size() > static_cast<std::size_t>(config.lbfgs_history)) {
          s_hist.pop_front();
          y_hist.pop_front();
        }
      }
    }

    double change = std::abs(nll - new_nll);
    nll = new_nll;
    if (change <= stop_threshold) break;
  }

  model.final_nll = nll;
  return model;
}

}  // namespace tagnoise
