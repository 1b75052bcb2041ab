#include "na2q/optim.hpp"

#include <cmath>

#include "na2q/errors.hpp"

namespace na2q {

Var ParamStore::add(const std::string& name, Tensor init) {
  if (params_.count(name)) throw KeyError("parameter already registered: " + name);
  Var v = Var::leaf(std::move(init), /*requires_grad=*/true);
  params_.emplace(name, v);
  return v;
}

Var ParamStore::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw KeyError("unknown parameter: " + name);
  return it->second;
}

Tensor& ParamStore::tensor(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw KeyError("unknown parameter: " + name);
  return it->second.value();
}

const Tensor& ParamStore::tensor(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw KeyError("unknown parameter: " + name);
  return it->second.value();
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

int64_t ParamStore::element_count() const {
  int64_t n = 0;
  for (const auto& [_, v] : params_) n += v.value().size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [_, v] : params_) v.value().clear_grad();
}

ParamStore ParamStore::clone_values() const {
  ParamStore out;
  for (const auto& [name, v] : params_) {
    Tensor t(v.value().shape, v.value().data);
    out.add(name, std::move(t));
  }
  return out;
}

void ParamStore::copy_values_from(const ParamStore& other) {
  if (params_.size() != other.params_.size()) {
    throw CompatibilityError("parameter stores have different entry counts");
  }
  auto it = params_.begin();
  auto jt = other.params_.begin();
  for (; it != params_.end(); ++it, ++jt) {
    if (it->first != jt->first || it->second.value().shape != jt->second.value().shape) {
      throw CompatibilityError("parameter mismatch at " + it->first);
    }
    it->second.value().data = jt->second.value().data;
  }
}

GradMap collect_grads(const ParamStore& store) {
  GradMap grads;
  for (const auto& [name, v] : store.entries()) {
    Tensor g(v.value().shape);
    if (v.value().has_grad()) g.data = v.value().grad;
    grads.emplace(name, std::move(g));
  }
  return grads;
}

double global_grad_norm(const GradMap& grads) {
  double sq = 0.0;
  for (const auto& [_, g] : grads) {
    for (double v : g.data) sq += v * v;
  }
  return std::sqrt(sq);
}

void clip_grad_norm(GradMap& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm <= max_norm || norm == 0.0) return;
  const double factor = max_norm / norm;
  for (auto& [_, g] : grads) {
    for (double& v : g.data) v *= factor;
  }
}

void optimizer_step(ParamStore& store, const GradMap& grads, OptimizerRule rule,
                    const OptimizerOptions& opts) {
  for (auto& [name, var] : store.entries()) {
    auto git = grads.find(name);
    if (git == grads.end()) throw KeyError("missing gradient for parameter: " + name);
    const Tensor& g = git->second;
    Tensor& p = var.value();
    if (!p.same_shape(g)) throw DimensionError("gradient shape mismatch for " + name);

    auto& slot = store.opt_state()[name];
    if (slot.m2.empty()) slot.m2.assign(p.data.size(), 0.0);

    if (rule == OptimizerRule::kRmsprop) {
      for (size_t i = 0; i < p.data.size(); ++i) {
        double gi = g.data[i];
        if (opts.weight_decay != 0.0) gi += opts.weight_decay * p.data[i];
        slot.m2[i] = opts.rmsprop_decay * slot.m2[i] + (1.0 - opts.rmsprop_decay) * gi * gi;
        p.data[i] -= opts.lr * gi / (std::sqrt(slot.m2[i]) + opts.rmsprop_eps);
      }
    } else {
      if (slot.m1.empty()) slot.m1.assign(p.data.size(), 0.0);
      slot.t += 1;
      const double bc1 = 1.0 - std::pow(opts.adam_beta1, static_cast<double>(slot.t));
      const double bc2 = 1.0 - std::pow(opts.adam_beta2, static_cast<double>(slot.t));
      for (size_t i = 0; i < p.data.size(); ++i) {
        double gi = g.data[i];
        if (opts.weight_decay != 0.0) gi += opts.weight_decay * p.data[i];
        slot.m1[i] = opts.adam_beta1 * slot.m1[i] + (1.0 - opts.adam_beta1) * gi;
        slot.m2[i] = opts.adam_beta2 * slot.m2[i] + (1.0 - opts.adam_beta2) * gi * gi;
        const double mhat = slot.m1[i] / bc1;
        const double vhat = slot.m2[i] / bc2;
        p.data[i] -= opts.lr * mhat / (std::sqrt(vhat) + opts.adam_eps);
      }
    }
  }
}

Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& v : t.data) v = rng.uniform(-bound, bound);
  return t;
}

double grad_check(const std::function<Var()>& loss_fn, ParamStore& store, double eps) {
  store.zero_grad();
  Var loss = loss_fn();
  if (!std::isfinite(loss.item())) throw NumericError("grad_check: non-finite loss");
  backward(loss);
  GradMap analytic = collect_grads(store);
  store.zero_grad();

  double max_rel = 0.0;
  for (const auto& name : store.names()) {
    Tensor& p = store.tensor(name);
    const Tensor& a = analytic.at(name);
    for (size_t i = 0; i < p.data.size(); ++i) {
      const double keep = p.data[i];
      double f_plus, f_minus;
      {
        NoGrad guard;
        p.data[i] = keep + eps;
        f_plus = loss_fn().item();
        p.data[i] = keep - eps;
        f_minus = loss_fn().item();
        p.data[i] = keep;
      }
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        throw NumericError("grad_check: non-finite loss at probe point");
      }
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double denom = std::max({1.0, std::abs(a.data[i]), std::abs(numeric)});
      max_rel = std::max(max_rel, std::abs(a.data[i] - numeric) / denom);
    }
  }
  return max_rel;
}

}  // namespace na2q
