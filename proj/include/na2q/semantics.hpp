#pragma once

#include <vector>

#include "na2q/autodiff.hpp"
#include "na2q/optim.hpp"
#include "na2q/rng.hpp"

namespace na2q {

struct VaeConfig {
  int input = 64;   // agent hidden state width (the history summary)
  int hidden = 32;
  int latent = 16;
  int obs_size = 0;  // decoder output width

  static constexpr double kLogVarMin = -10.0;
  static constexpr double kLogVarMax = 10.0;
};

// Per-agent identity semantics: Gaussian latent and the sigmoid mask decoded
// from it.
struct SemanticBundle {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> z;
  std::vector<double> mask;
};

// Encoder/decoder pair over agent history summaries. The encoder maps the
// GRU hidden state to a diagonal Gaussian (mu, log-variance); the decoder
// upsamples a latent to an observation-shaped mask through a sigmoid, so
// every mask entry lies in (0, 1).
class IdentityVae {
 public:
  IdentityVae(ParamStore& store, VaeConfig cfg);

  static void init_params(ParamStore& store, const VaeConfig& cfg, Rng& rng);

  const VaeConfig& config() const { return cfg_; }

  struct Encoded {
    Var mu;       // [rows x latent]
    Var log_var;  // [rows x latent], clamped to [-10, 10]
  };

  Encoded encode(const Var& h_rows) const;

  // Reparameterized sample z = mu + exp(log_var / 2) * noise. The noise is a
  // constant, so gradients reach mu and log_var only.
  Var sample(const Encoded& enc, Tensor noise) const;

  Var decode(const Var& z_rows) const;  // [rows x obs_size], entries in (0,1)

  // Per-row loss pieces, each [rows x 1].
  static Var reconstruction_rows(const Var& mask, const Tensor& obs_rows);
  static Var kl_rows(const Encoded& enc);
  static Var l1_rows(const Var& mask);

  // Evaluation helpers (no graph). The "mean" variant reports the mask at the
  // latent mean, used wherever determinism matters.
  SemanticBundle bundle_at_mean(const std::vector<double>& hidden) const;
  SemanticBundle bundle_sampled(const std::vector<double>& hidden, Rng& rng) const;

  Tensor standard_normal(int rows, Rng& rng) const;

 private:
  VaeConfig cfg_;
  Var enc1_w_, enc1_b_, enc2_w_, enc2_b_, dec1_w_, dec1_b_, dec2_w_, dec2_b_;
};

// Closed-form losses over per-agent bundles: sum over agents of the squared
// reconstruction gap between o and M * o plus the Gaussian KL to N(0, I).
double vae_loss(const std::vector<std::vector<double>>& obs,
                const std::vector<SemanticBundle>& bundles);

// Sum over agents of the mask L1 norms (masks are positive, so this is the
// plain entry sum).
double mask_penalty(const std::vector<SemanticBundle>& bundles);

}  // namespace na2q
