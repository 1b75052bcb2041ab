#pragma once

#include <vector>

#include "na2q/env.hpp"
#include "na2q/rng.hpp"

namespace na2q {

// Level-based foraging on a grid. Agents carry levels; scattered foods carry
// levels. A food is eaten when the levels of all agents simultaneously
// choosing `eat` while 4-adjacent to it sum to at least the food's level, and
// the team is rewarded with the food's level normalized by the total food
// level at reset. Every movement action costs a small penalty. The reward is
// a single shared scalar.
struct LbfConfig {
  int grid_width = 10;
  int grid_height = 10;
  int n_agents = 3;
  int n_foods = 3;
  int max_player_level = 3;
  int max_food_level = 3;
  int view = 5;  // odd egocentric window edge
  int max_steps = 50;
  double move_penalty = 0.002;
};

// Actions, in this order.
enum LbfAction : int {
  kUp = 0,
  kDown = 1,
  kLeft = 2,
  kRight = 3,
  kEat = 4,
  kNone = 5,
};

class LbfEnv final : public Env {
 public:
  struct AgentState {
    int x = -1, y = -1;  // off-grid until placed by reset()
    int level = 1;
  };
  struct FoodState {
    int x = -1, y = -1;
    int level = 1;
    bool eaten = false;
  };

  explicit LbfEnv(LbfConfig cfg);

  int n_agents() const override { return cfg_.n_agents; }
  int n_actions() const override { return 6; }
  int obs_size() const override;
  int state_size() const override;
  int max_episode_length() const override { return cfg_.max_steps; }
  ObsLayout obs_layout() const override { return {cfg_.view, cfg_.view, 3, 1}; }

  void reset(uint64_t seed) override;
  StepOutcome step(const std::vector<int>& joint_action) override;
  bool done() const override { return done_; }

  const std::vector<std::vector<double>>& observations() const override { return obs_; }
  const std::vector<double>& state() const override { return state_; }

  const std::vector<AgentState>& agents() const { return agents_; }
  const std::vector<FoodState>& foods() const { return foods_; }
  int step_count() const { return step_count_; }
  double total_food_level() const { return total_food_level_; }

  const LbfConfig& config() const { return cfg_; }

 private:
  void refresh_views();
  bool cell_free(int x, int y) const;
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < cfg_.grid_width && y >= 0 && y < cfg_.grid_height;
  }

  LbfConfig cfg_;
  std::vector<AgentState> agents_;
  std::vector<FoodState> foods_;
  int step_count_ = 0;
  bool done_ = true;  // reset() must be called before step()
  double total_food_level_ = 0.0;
  std::vector<std::vector<double>> obs_;
  std::vector<double> state_;
};

}  // namespace na2q
