#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "na2q/autodiff.hpp"
#include "na2q/optim.hpp"
#include "na2q/rng.hpp"

namespace na2q {

// Linear exploration anneal, clamped at `finish`.
struct EpsilonSchedule {
  double start = 1.0;
  double finish = 0.05;
  int64_t anneal_steps = 50000;

  double at(int64_t t) const {
    if (t < 0) t = 0;
    if (t >= anneal_steps) return finish;
    const double frac = static_cast<double>(t) / static_cast<double>(anneal_steps);
    return start + (finish - start) * frac;
  }
};

struct AgentNetConfig {
  int obs_size = 0;
  int n_actions = 0;
  int n_agents = 0;
  int hidden = 64;

  int input_size() const { return obs_size + n_actions + n_agents; }
};

// Recurrent utility network Q_i(tau_i, u_i), shared across agents. One
// parameter set backs every agent; identity enters only through a one-hot
// agent id appended to the input, alongside the observation and the one-hot
// previous action.
//
// Structure: input affine -> ReLU -> GRU(hidden) -> output affine.
class AgentNet {
 public:
  AgentNet(ParamStore& store, AgentNetConfig cfg);

  static void init_params(ParamStore& store, const AgentNetConfig& cfg, Rng& rng);

  const AgentNetConfig& config() const { return cfg_; }

  struct StepVars {
    Var q;  // [rows x n_actions]
    Var h;  // [rows x hidden]
  };

  // One recurrent step over a batch of rows (each row one agent instance).
  StepVars step(const Var& input_rows, const Var& h_rows) const;

  // Builds input rows for all agents at one environment step. last_action -1
  // means "no previous action" (episode start), encoded as the zero vector.
  Tensor assemble_inputs(const std::vector<std::vector<double>>& obs,
                         const std::vector<int>& last_actions) const;

  // Single-agent convenience used during rollouts and in tests: returns the
  // action utilities and the updated hidden state. No graph is recorded.
  std::pair<std::vector<double>, std::vector<double>> q_forward(
      const std::vector<double>& obs, int last_action, int agent_id,
      const std::vector<double>& hidden) const;

  Tensor zero_hidden(int rows) const { return Tensor::zeros(rows, cfg_.hidden); }

 private:
  AgentNetConfig cfg_;
  Var fc1_w_, fc1_b_, gru_wx_, gru_wh_, gru_bx_, gru_bh_, fc2_w_, fc2_b_;
};

// Greedy action over the available ones; ties resolve to the lowest index.
int greedy_action(const std::vector<double>& q, const std::vector<uint8_t>& avail);

// Epsilon-greedy: with probability epsilon a uniform draw over available
// actions, otherwise the greedy choice.
int select_action(const std::vector<double>& q, const std::vector<uint8_t>& avail,
                  double epsilon, Rng& rng);

}  // namespace na2q
