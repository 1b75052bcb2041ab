#include "na2q/agent.hpp"

#include <stdexcept>

#include "na2q/errors.hpp"

namespace na2q {

void AgentNet::init_params(ParamStore& store, const AgentNetConfig& cfg, Rng& rng) {
  const int in = cfg.input_size();
  const int h = cfg.hidden;
  store.add("agent.fc1.w", init_uniform({in, h}, in, rng));
  store.add("agent.fc1.b", init_uniform({h}, in, rng));
  store.add("agent.gru.wx", init_uniform({h, 3 * h}, h, rng));
  store.add("agent.gru.wh", init_uniform({h, 3 * h}, h, rng));
  store.add("agent.gru.bx", init_uniform({3 * h}, h, rng));
  store.add("agent.gru.bh", init_uniform({3 * h}, h, rng));
  store.add("agent.fc2.w", init_uniform({h, cfg.n_actions}, h, rng));
  store.add("agent.fc2.b", init_uniform({cfg.n_actions}, h, rng));
}

AgentNet::AgentNet(ParamStore& store, AgentNetConfig cfg) : cfg_(cfg) {
  fc1_w_ = store.get("agent.fc1.w");
  fc1_b_ = store.get("agent.fc1.b");
  gru_wx_ = store.get("agent.gru.wx");
  gru_wh_ = store.get("agent.gru.wh");
  gru_bx_ = store.get("agent.gru.bx");
  gru_bh_ = store.get("agent.gru.bh");
  fc2_w_ = store.get("agent.fc2.w");
  fc2_b_ = store.get("agent.fc2.b");
}

AgentNet::StepVars AgentNet::step(const Var& input_rows, const Var& h_rows) const {
  Var e = relu(affine(input_rows, fc1_w_, fc1_b_));
  Var h = gru_cell(e, h_rows, gru_wx_, gru_wh_, gru_bx_, gru_bh_);
  Var q = affine(h, fc2_w_, fc2_b_);
  return {q, h};
}

Tensor AgentNet::assemble_inputs(const std::vector<std::vector<double>>& obs,
                                 const std::vector<int>& last_actions) const {
  const int n = cfg_.n_agents;
  if (static_cast<int>(obs.size()) != n || static_cast<int>(last_actions.size()) != n) {
    throw DimensionError("agent inputs: need one observation and last action per agent");
  }
  Tensor rows({n, cfg_.input_size()});
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(obs[i].size()) != cfg_.obs_size) {
      throw DimensionError("agent inputs: observation length mismatch");
    }
    double* r = rows.data.data() + static_cast<size_t>(i) * cfg_.input_size();
    std::copy(obs[i].begin(), obs[i].end(), r);
    if (last_actions[i] >= 0) {
      if (last_actions[i] >= cfg_.n_actions) throw DimensionError("agent inputs: bad last action");
      r[cfg_.obs_size + last_actions[i]] = 1.0;
    }
    r[cfg_.obs_size + cfg_.n_actions + i] = 1.0;
  }
  return rows;
}

std::pair<std::vector<double>, std::vector<double>> AgentNet::q_forward(
    const std::vector<double>& obs, int last_action, int agent_id,
    const std::vector<double>& hidden) const {
  if (agent_id < 0 || agent_id >= cfg_.n_agents) {
    throw std::out_of_range("agent id out of range");
  }
  if (static_cast<int>(obs.size()) != cfg_.obs_size ||
      static_cast<int>(hidden.size()) != cfg_.hidden) {
    throw DimensionError("q_forward: input length mismatch");
  }
  NoGrad guard;
  Tensor in({1, cfg_.input_size()});
  std::copy(obs.begin(), obs.end(), in.data.begin());
  if (last_action >= 0) {
    if (last_action >= cfg_.n_actions) throw DimensionError("q_forward: bad last action");
    in.data[cfg_.obs_size + last_action] = 1.0;
  }
  in.data[cfg_.obs_size + cfg_.n_actions + agent_id] = 1.0;
  Tensor h({1, cfg_.hidden}, hidden);
  StepVars out = step(Var::constant(std::move(in)), Var::constant(std::move(h)));
  return {out.q.value().data, out.h.value().data};
}

int greedy_action(const std::vector<double>& q, const std::vector<uint8_t>& avail) {
  if (q.size() != avail.size()) throw DimensionError("greedy: q/avail length mismatch");
  int best = -1;
  for (size_t a = 0; a < q.size(); ++a) {
    if (!avail[a]) continue;
    if (best < 0 || q[a] > q[best]) best = static_cast<int>(a);
  }
  if (best < 0) throw AvailabilityError("no available action");
  return best;
}

int select_action(const std::vector<double>& q, const std::vector<uint8_t>& avail,
                  double epsilon, Rng& rng) {
  std::vector<int> options;
  options.reserve(q.size());
  for (size_t a = 0; a < avail.size(); ++a) {
    if (avail[a]) options.push_back(static_cast<int>(a));
  }
  if (options.empty()) throw AvailabilityError("no available action");
  if (rng.uniform() < epsilon) {
    return options[rng.uniform_int(static_cast<int>(options.size()))];
  }
  return greedy_action(q, avail);
}

}  // namespace na2q
