#include "na2q/lbf.hpp"

#include <algorithm>

namespace na2q {

LbfEnv::LbfEnv(LbfConfig cfg) : cfg_(cfg) {
  if (cfg_.view % 2 != 1 || cfg_.view < 1) throw ConfigError("lbf: view must be odd");
  if (cfg_.n_agents < 1 || cfg_.n_foods < 1) throw ConfigError("lbf: need agents and foods");
  if (cfg_.n_agents + cfg_.n_foods > cfg_.grid_width * cfg_.grid_height) {
    throw ConfigError("lbf: more entities than grid cells");
  }
  if (cfg_.max_player_level < 1 || cfg_.max_food_level < 1) {
    throw ConfigError("lbf: levels must be positive");
  }
}

int LbfEnv::obs_size() const { return cfg_.view * cfg_.view * 3 + 1; }

int LbfEnv::state_size() const { return cfg_.grid_width * cfg_.grid_height * 2; }

bool LbfEnv::cell_free(int x, int y) const {
  for (const auto& a : agents_) {
    if (a.x == x && a.y == y) return false;
  }
  for (const auto& f : foods_) {
    if (!f.eaten && f.x == x && f.y == y) return false;
  }
  return true;
}

void LbfEnv::reset(uint64_t seed) {
  Rng rng(seed);
  agents_.assign(cfg_.n_agents, {});
  foods_.assign(cfg_.n_foods, {});
  for (int i = 0; i < cfg_.n_agents; ++i) {
    int x, y;
    do {
      x = rng.uniform_int(cfg_.grid_width);
      y = rng.uniform_int(cfg_.grid_height);
    } while (!cell_free(x, y));
    agents_[i].x = x;
    agents_[i].y = y;
    agents_[i].level = 1 + rng.uniform_int(cfg_.max_player_level);
  }
  total_food_level_ = 0.0;
  for (auto& f : foods_) {
    int x, y;
    do {
      x = rng.uniform_int(cfg_.grid_width);
      y = rng.uniform_int(cfg_.grid_height);
    } while (!cell_free(x, y));
    f.x = x;
    f.y = y;
    f.level = 1 + rng.uniform_int(cfg_.max_food_level);
    f.eaten = false;
    total_food_level_ += f.level;
  }
  step_count_ = 0;
  done_ = false;
  refresh_views();
}

StepOutcome LbfEnv::step(const std::vector<int>& joint_action) {
  if (done_) throw LifecycleError("lbf: step() after episode end");
  if (static_cast<int>(joint_action.size()) != cfg_.n_agents) {
    throw DimensionError("lbf: one action per agent required");
  }
  for (int a : joint_action) {
    if (a < 0 || a > kNone) throw ConfigError("lbf: unknown action id");
  }

  double reward = 0.0;

  // Movement phase. Targets are checked against pre-move occupancy and any
  // contested cell cancels all moves into it, so the outcome is independent
  // of agent order.
  static constexpr int kDx[4] = {0, 0, -1, 1};
  static constexpr int kDy[4] = {-1, 1, 0, 0};
  std::vector<int> tx(cfg_.n_agents), ty(cfg_.n_agents);
  std::vector<bool> moving(cfg_.n_agents, false);
  for (int i = 0; i < cfg_.n_agents; ++i) {
    const int act = joint_action[i];
    tx[i] = agents_[i].x;
    ty[i] = agents_[i].y;
    if (act <= kRight) {
      reward -= cfg_.move_penalty;
      const int nx = agents_[i].x + kDx[act];
      const int ny = agents_[i].y + kDy[act];
      if (in_bounds(nx, ny) && cell_free(nx, ny)) {
        tx[i] = nx;
        ty[i] = ny;
        moving[i] = true;
      }
    }
  }
  for (int i = 0; i < cfg_.n_agents; ++i) {
    if (!moving[i]) continue;
    for (int j = 0; j < cfg_.n_agents; ++j) {
      if (j != i && moving[j] && tx[i] == tx[j] && ty[i] == ty[j]) {
        moving[i] = false;
        moving[j] = false;
      }
    }
  }
  for (int i = 0; i < cfg_.n_agents; ++i) {
    if (moving[i]) {
      agents_[i].x = tx[i];
      agents_[i].y = ty[i];
    }
  }

  // Eating phase: each uneaten food checks the 4-adjacent agents that chose
  // eat this step; their summed level must reach the food's level.
  for (auto& f : foods_) {
    if (f.eaten) continue;
    int level_sum = 0;
    for (int i = 0; i < cfg_.n_agents; ++i) {
      if (joint_action[i] != kEat) continue;
      const int dist = std::abs(agents_[i].x - f.x) + std::abs(agents_[i].y - f.y);
      if (dist == 1) level_sum += agents_[i].level;
    }
    if (level_sum >= f.level) {
      f.eaten = true;
      reward += static_cast<double>(f.level) / total_food_level_;
    }
  }

  ++step_count_;
  const bool all_eaten = std::all_of(foods_.begin(), foods_.end(),
                                     [](const FoodState& f) { return f.eaten; });
  done_ = all_eaten || step_count_ >= cfg_.max_steps;
  refresh_views();
  return {reward, done_};
}

void LbfEnv::refresh_views() {
  const int v = cfg_.view;
  const int half = v / 2;
  const int plane = v * v;
  obs_.assign(cfg_.n_agents, std::vector<double>(obs_size(), 0.0));
  for (int i = 0; i < cfg_.n_agents; ++i) {
    auto& o = obs_[i];
    const int cx = agents_[i].x;
    const int cy = agents_[i].y;
    for (int dy = -half; dy <= half; ++dy) {
      for (int dx = -half; dx <= half; ++dx) {
        const int cell = (dy + half) * v + (dx + half);
        const int x = cx + dx;
        const int y = cy + dy;
        if (!in_bounds(x, y)) {
          o[2 * plane + cell] = 1.0;  // out-of-bounds channel
          continue;
        }
        for (const auto& a : agents_) {
          if (a.x == x && a.y == y) o[0 * plane + cell] = a.level;
        }
        for (const auto& f : foods_) {
          if (!f.eaten && f.x == x && f.y == y) o[1 * plane + cell] = f.level;
        }
      }
    }
    o[3 * plane] = agents_[i].level;
  }

  // Global state: agent-level and food-level planes over the full grid.
  state_.assign(state_size(), 0.0);
  const int gplane = cfg_.grid_width * cfg_.grid_height;
  for (const auto& a : agents_) {
    state_[a.y * cfg_.grid_width + a.x] = a.level;
  }
  for (const auto& f : foods_) {
    if (!f.eaten) state_[gplane + f.y * cfg_.grid_width + f.x] = f.level;
  }
}

}  // namespace na2q
