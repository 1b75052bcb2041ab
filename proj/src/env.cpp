#include "na2q/env.hpp"

#include <json.hpp>

namespace na2q {

void write_trajectory_record(std::ostream& out, const std::vector<double>& state,
                             const std::vector<std::vector<double>>& obs,
                             const std::vector<int>& actions, double reward, bool done) {
  nlohmann::ordered_json rec;
  rec["state"] = state;
  rec["obs"] = obs;
  rec["actions"] = actions;
  rec["reward"] = reward;
  rec["done"] = done;
  out << rec.dump() << '\n';
}

}  // namespace na2q
