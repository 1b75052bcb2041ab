#include "na2q/matrix_game.hpp"

#include <cmath>

namespace na2q {

int64_t MatrixGame::joint_count() const {
  int64_t n = 1;
  for (int i = 0; i < n_agents; ++i) n *= n_actions;
  return n;
}

int64_t MatrixGame::flat_index(const std::vector<int>& joint) const {
  if (static_cast<int>(joint.size()) != n_agents) {
    throw DimensionError("matrix game: joint action arity mismatch");
  }
  int64_t idx = 0;
  for (int i = 0; i < n_agents; ++i) {
    if (joint[i] < 0 || joint[i] >= n_actions) {
      throw DimensionError("matrix game: action id out of range");
    }
    idx = idx * n_actions + joint[i];
  }
  return idx;
}

void MatrixGame::validate() const {
  if (n_agents < 1 || n_actions < 1) throw ConfigError("matrix game: bad arity");
  if (static_cast<int64_t>(payoff.size()) != joint_count()) {
    throw ConfigError("matrix game: payoff table size must be n_actions^n_agents");
  }
  for (double v : payoff) {
    if (!std::isfinite(v)) throw ConfigError("matrix game: payoff must be finite");
  }
}

EnumerationResult enumerate_joint_values(
    const MatrixGame& game, const std::function<double(const std::vector<int>&)>& joint_value) {
  const int64_t total = game.joint_count();
  if (total > 1000000) throw SizeError("matrix game: joint action table exceeds 10^6 entries");

  EnumerationResult result;
  result.table.resize(total);
  std::vector<int> joint(game.n_agents, 0);
  double best = 0.0;
  for (int64_t idx = 0; idx < total; ++idx) {
    const double v = joint_value(joint);
    result.table[idx] = v;
    // Odometer order is lexicographic, so strict improvement keeps the
    // smallest tuple among ties.
    if (idx == 0 || v > best) {
      best = v;
      result.argmax = joint;
    }
    for (int i = game.n_agents - 1; i >= 0; --i) {
      if (++joint[i] < game.n_actions) break;
      joint[i] = 0;
    }
  }
  return result;
}

MatrixGameEnv::MatrixGameEnv(MatrixGame game) : game_(std::move(game)) {
  game_.validate();
}

void MatrixGameEnv::reset(uint64_t) {
  obs_.assign(game_.n_agents, std::vector<double>{1.0});
  state_.assign(1, 1.0);
  done_ = false;
}

StepOutcome MatrixGameEnv::step(const std::vector<int>& joint_action) {
  if (done_) throw LifecycleError("matrix game: step() after episode end");
  const double r = game_.payoff_at(joint_action);
  done_ = true;
  return {r, true};
}

}  // namespace na2q
