#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "na2q/env.hpp"

namespace na2q {

// One-step cooperative game: every joint action indexes a payoff table.
// Serves as an enumerable oracle environment for greedy-consistency checks.
struct MatrixGame {
  int n_agents = 2;
  int n_actions = 3;
  std::vector<double> payoff;  // row-major over joint actions, agent 0 slowest

  int64_t joint_count() const;
  int64_t flat_index(const std::vector<int>& joint) const;
  double payoff_at(const std::vector<int>& joint) const { return payoff[flat_index(joint)]; }
  void validate() const;
};

struct EnumerationResult {
  std::vector<int> argmax;    // lexicographically smallest among ties
  std::vector<double> table;  // value per joint action, same indexing as payoff
};

// Exhaustively tabulates `joint_value` over all joint actions and returns the
// argmax (ties broken toward the lexicographically smallest tuple). Refuses
// tables above 10^6 entries.
EnumerationResult enumerate_joint_values(
    const MatrixGame& game, const std::function<double(const std::vector<int>&)>& joint_value);

class MatrixGameEnv final : public Env {
 public:
  explicit MatrixGameEnv(MatrixGame game);

  int n_agents() const override { return game_.n_agents; }
  int n_actions() const override { return game_.n_actions; }
  int obs_size() const override { return 1; }
  int state_size() const override { return 1; }
  int max_episode_length() const override { return 1; }

  void reset(uint64_t seed) override;
  StepOutcome step(const std::vector<int>& joint_action) override;
  bool done() const override { return done_; }

  const std::vector<std::vector<double>>& observations() const override { return obs_; }
  const std::vector<double>& state() const override { return state_; }

  const MatrixGame& game() const { return game_; }

 private:
  MatrixGame game_;
  bool done_ = true;
  std::vector<std::vector<double>> obs_;
  std::vector<double> state_;
};

}  // namespace na2q
