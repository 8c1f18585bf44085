#include "synthlearn/dp.hpp"

namespace synthlearn {

const std::vector<DpArm>& dp_ablation_arms() {
  static const std::vector<DpArm> arms = [] {
    std::vector<DpArm> v;
    v.push_back({"baseline", DpConfig{false, 0.0, 0.0, 1}, 0});
    v.push_back({"dp_full", DpConfig{true, 1.5, 0.2, 1}, 1});
    v.push_back({"dp_noise_0.02", DpConfig{true, 1.5, 0.02, 1}, 1});
    v.push_back({"dp_batch4", DpConfig{true, 1.5, 0.2, 1}, 4});
    v.push_back({"dp_noclip", DpConfig{true, 0.0, 0.2, 1}, 1});
    v.push_back({"dp_cliponly", DpConfig{true, 1.5, 0.0, 1}, 1});
    return v;
  }();
  return arms;
}

const DpArm& dp_arm(const std::string& name) {
  for (const auto& arm : dp_ablation_arms())
    if (arm.name == name) return arm;
  throw ConfigError("unknown dp arm: " + name);
}

std::vector<std::string> dp_study_arm_names() {
  return {"dp_full", "dp_noise_0.02", "dp_batch4", "dp_noclip"};
}

}  // namespace synthlearn
