#include "synthlearn/ada.hpp"

namespace synthlearn {

void ada_update(AdaState& state, double real_logit_sign_mean, std::size_t batch,
                const AdaConfig& cfg) {
  if (cfg.adjust_interval == 0) throw ConfigError("ada: adjust_interval must be positive");
  if (cfg.ramp_images == 0) throw ConfigError("ada: ramp_images must be positive");
  state.sign_accum += real_logit_sign_mean;
  state.minibatches_seen += 1;
  if (state.minibatches_seen < cfg.adjust_interval) return;

  const double r = state.sign_accum / static_cast<double>(state.minibatches_seen);
  const double step = static_cast<double>(batch * cfg.adjust_interval) /
                      static_cast<double>(cfg.ramp_images);
  const double dir = r > cfg.target ? 1.0 : (r < cfg.target ? -1.0 : 0.0);
  state.p = std::clamp(state.p + dir * step, 0.0, cfg.p_max);
  state.sign_accum = 0.0;
  state.minibatches_seen = 0;
}

}  // namespace synthlearn
