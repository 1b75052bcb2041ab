#include "na2q/semantics.hpp"

#include <cmath>

#include "na2q/errors.hpp"

namespace na2q {

void IdentityVae::init_params(ParamStore& store, const VaeConfig& cfg, Rng& rng) {
  store.add("vae.enc1.w", init_uniform({cfg.input, cfg.hidden}, cfg.input, rng));
  store.add("vae.enc1.b", init_uniform({cfg.hidden}, cfg.input, rng));
  store.add("vae.enc2.w", init_uniform({cfg.hidden, 2 * cfg.latent}, cfg.hidden, rng));
  store.add("vae.enc2.b", init_uniform({2 * cfg.latent}, cfg.hidden, rng));
  store.add("vae.dec1.w", init_uniform({cfg.latent, cfg.hidden}, cfg.latent, rng));
  store.add("vae.dec1.b", init_uniform({cfg.hidden}, cfg.latent, rng));
  store.add("vae.dec2.w", init_uniform({cfg.hidden, cfg.obs_size}, cfg.hidden, rng));
  store.add("vae.dec2.b", init_uniform({cfg.obs_size}, cfg.hidden, rng));
}

IdentityVae::IdentityVae(ParamStore& store, VaeConfig cfg) : cfg_(cfg) {
  enc1_w_ = store.get("vae.enc1.w");
  enc1_b_ = store.get("vae.enc1.b");
  enc2_w_ = store.get("vae.enc2.w");
  enc2_b_ = store.get("vae.enc2.b");
  dec1_w_ = store.get("vae.dec1.w");
  dec1_b_ = store.get("vae.dec1.b");
  dec2_w_ = store.get("vae.dec2.w");
  dec2_b_ = store.get("vae.dec2.b");
}

IdentityVae::Encoded IdentityVae::encode(const Var& h_rows) const {
  Var e = relu(affine(h_rows, enc1_w_, enc1_b_));
  Var out = affine(e, enc2_w_, enc2_b_);
  std::vector<int> mu_cols(cfg_.latent), lv_cols(cfg_.latent);
  for (int j = 0; j < cfg_.latent; ++j) {
    mu_cols[j] = j;
    lv_cols[j] = cfg_.latent + j;
  }
  Var mu = select_cols(out, mu_cols);
  Var log_var = clamp(select_cols(out, lv_cols), VaeConfig::kLogVarMin, VaeConfig::kLogVarMax);
  return {mu, log_var};
}

Var IdentityVae::sample(const Encoded& enc, Tensor noise) const {
  Var sigma = exp_op(scale(enc.log_var, 0.5));
  return add(enc.mu, mul_const(sigma, std::move(noise)));
}

Var IdentityVae::decode(const Var& z_rows) const {
  Var e = relu(affine(z_rows, dec1_w_, dec1_b_));
  return sigmoid(affine(e, dec2_w_, dec2_b_));
}

Var IdentityVae::reconstruction_rows(const Var& mask, const Tensor& obs_rows) {
  Var obs = Var::constant(obs_rows);
  Var diff = sub(obs, mul(mask, obs));
  return row_sum(square(diff));
}

Var IdentityVae::kl_rows(const Encoded& enc) {
  // 0.5 * sum(mu^2 + sigma^2 - 1 - log sigma^2), with log sigma^2 = log_var.
  Var inner = add_scalar(sub(add(square(enc.mu), exp_op(enc.log_var)), enc.log_var), -1.0);
  return scale(row_sum(inner), 0.5);
}

Var IdentityVae::l1_rows(const Var& mask) { return row_sum(mask); }

Tensor IdentityVae::standard_normal(int rows, Rng& rng) const {
  Tensor noise({rows, cfg_.latent});
  for (auto& v : noise.data) v = rng.normal();
  return noise;
}

namespace {

SemanticBundle finish_bundle(const IdentityVae& vae, const Var& mu, const Var& log_var,
                             std::vector<double> z) {
  SemanticBundle b;
  b.mu = mu.value().data;
  b.sigma.resize(b.mu.size());
  for (size_t i = 0; i < b.sigma.size(); ++i) {
    b.sigma[i] = std::exp(0.5 * log_var.value().data[i]);
  }
  b.z = std::move(z);
  Tensor zt({1, static_cast<int>(b.z.size())}, b.z);
  b.mask = vae.decode(Var::constant(std::move(zt))).value().data;
  return b;
}

}  // namespace

SemanticBundle IdentityVae::bundle_at_mean(const std::vector<double>& hidden) const {
  NoGrad guard;
  Tensor h({1, cfg_.input}, hidden);
  Encoded enc = encode(Var::constant(std::move(h)));
  return finish_bundle(*this, enc.mu, enc.log_var, enc.mu.value().data);
}

SemanticBundle IdentityVae::bundle_sampled(const std::vector<double>& hidden, Rng& rng) const {
  NoGrad guard;
  Tensor h({1, cfg_.input}, hidden);
  Encoded enc = encode(Var::constant(std::move(h)));
  std::vector<double> z(cfg_.latent);
  for (int j = 0; j < cfg_.latent; ++j) {
    const double sigma = std::exp(0.5 * enc.log_var.value().data[j]);
    z[j] = enc.mu.value().data[j] + sigma * rng.normal();
  }
  return finish_bundle(*this, enc.mu, enc.log_var, std::move(z));
}

double vae_loss(const std::vector<std::vector<double>>& obs,
                const std::vector<SemanticBundle>& bundles) {
  if (obs.size() != bundles.size()) throw DimensionError("vae_loss: one bundle per agent");
  double total = 0.0;
  for (size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    const auto& b = bundles[i];
    if (o.size() != b.mask.size()) throw DimensionError("vae_loss: mask/observation mismatch");
    for (size_t j = 0; j < o.size(); ++j) {
      const double d = o[j] - b.mask[j] * o[j];
      total += d * d;
    }
    for (size_t j = 0; j < b.mu.size(); ++j) {
      const double var = b.sigma[j] * b.sigma[j];
      total += 0.5 * (b.mu[j] * b.mu[j] + var - 1.0 - std::log(var));
    }
  }
  if (!std::isfinite(total)) throw NumericError("vae_loss: non-finite value");
  return total;
}

double mask_penalty(const std::vector<SemanticBundle>& bundles) {
  double total = 0.0;
  for (const auto& b : bundles) {
    for (double m : b.mask) total += m;
  }
  return total;
}

}  // namespace na2q
