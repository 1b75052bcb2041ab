#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "na2q/autodiff.hpp"
#include "na2q/rng.hpp"
#include "na2q/tensor.hpp"

namespace na2q {

enum class OptimizerRule { kRmsprop, kAdam };

struct OptimizerOptions {
  double lr = 5e-4;
  double rmsprop_decay = 0.99;
  double rmsprop_eps = 1e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double weight_decay = 0.0;
};

// Named parameter collection. Parameters are autodiff leaves; per-parameter
// optimizer accumulators live alongside them so a store can be checkpointed
// as one unit. Iteration order is the sorted name order everywhere, which
// keeps initialization, updates, and serialization deterministic.
class ParamStore {
 public:
  // Optimizer accumulators: `m2` holds the mean-square buffer for RMSprop and
  // the second moment for Adam; `m1` is the Adam first moment; `t` the Adam
  // step count.
  struct SlotState {
    uint64_t t = 0;
    std::vector<double> m1;
    std::vector<double> m2;
  };

  Var add(const std::string& name, Tensor init);
  Var get(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  Tensor& tensor(const std::string& name);
  const Tensor& tensor(const std::string& name) const;

  std::vector<std::string> names() const;
  size_t size() const { return params_.size(); }
  int64_t element_count() const;

  void zero_grad();

  // Deep copy of values (fresh leaves, no grads, no optimizer state).
  ParamStore clone_values() const;
  // Overwrites this store's values with `other`'s; shapes must match.
  void copy_values_from(const ParamStore& other);

  std::map<std::string, SlotState>& opt_state() { return state_; }
  const std::map<std::string, SlotState>& opt_state() const { return state_; }

  const std::map<std::string, Var>& entries() const { return params_; }
  std::map<std::string, Var>& entries() { return params_; }

 private:
  std::map<std::string, Var> params_;
  std::map<std::string, SlotState> state_;
};

using GradMap = std::map<std::string, Tensor>;

// Snapshot of the gradients currently stored on the parameters. Parameters
// that did not participate in the last backward pass get zero gradients.
GradMap collect_grads(const ParamStore& store);

double global_grad_norm(const GradMap& grads);
// Rescales all gradients so the global norm is at most max_norm.
void clip_grad_norm(GradMap& grads, double max_norm);

// One optimizer update. Every parameter in `store` must be present in
// `grads`; a missing entry raises KeyError.
void optimizer_step(ParamStore& store, const GradMap& grads, OptimizerRule rule,
                    const OptimizerOptions& opts);

// Uniform init in +-1/sqrt(fan_in).
Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng);

// Central-difference gradient checker. Evaluates `loss_fn` (which must build
// a fresh graph over the store's parameters and return a scalar), compares
// analytic gradients against central differences for every parameter
// element, and returns the maximum relative error
// |analytic - numeric| / max(1, |analytic|, |numeric|).
double grad_check(const std::function<Var()>& loss_fn, ParamStore& store, double eps = 1e-5);

}  // namespace na2q
