#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <vector>

#include "na2q/errors.hpp"

namespace na2q {

struct StepOutcome {
  double reward = 0.0;
  bool done = false;
};

// Shape metadata for observations that are egocentric windows; all-zero for
// flat observations.
struct ObsLayout {
  int height = 0;
  int width = 0;
  int channels = 0;
  int extras = 0;
  bool is_window() const { return height > 0; }
};

// Cooperative multi-agent environment with a shared team reward.
class Env {
 public:
  virtual ~Env() = default;

  virtual int n_agents() const = 0;
  virtual int n_actions() const = 0;
  virtual int obs_size() const = 0;
  virtual int state_size() const = 0;
  virtual int max_episode_length() const = 0;
  virtual ObsLayout obs_layout() const { return {}; }

  virtual void reset(uint64_t seed) = 0;
  virtual StepOutcome step(const std::vector<int>& joint_action) = 0;
  virtual bool done() const = 0;

  virtual const std::vector<std::vector<double>>& observations() const = 0;
  virtual const std::vector<double>& state() const = 0;

  // All actions are available in the built-in environments; the mask exists
  // for generality.
  virtual std::vector<std::vector<uint8_t>> available_actions() const {
    return std::vector<std::vector<uint8_t>>(
        n_agents(), std::vector<uint8_t>(n_actions(), 1));
  }
};

// One JSON-lines record per step: state, per-agent observations, actions,
// reward, done.
void write_trajectory_record(std::ostream& out, const std::vector<double>& state,
                             const std::vector<std::vector<double>>& obs,
                             const std::vector<int>& actions, double reward, bool done);

}  // namespace na2q
