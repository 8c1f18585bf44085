#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "synthlearn/common.hpp"

namespace synthlearn {

// Per-microbatch clip-and-noise transform. Microbatch gradients are
// sum-reduced over their samples; the transform clips each to clip_norm,
// sums them in list order, adds one draw of Gaussian noise per coordinate,
// and divides by the total sample count. clip_norm <= 0 disables clipping,
// noise_std <= 0 disables the noise draw entirely, so a fully disabled
// transform reproduces the plain averaged gradient bit for bit.
struct DpConfig {
  bool enabled = false;
  double clip_norm = 1.5;
  double noise_std = 0.2;
  std::size_t microbatch_size = 1;
};

template <typename T>
double l2_norm(const std::vector<T>& v) {
  double acc = 0.0;
  for (const T x : v) acc += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(acc);
}

// Scales to clip_norm when the norm exceeds it; otherwise returns the input
// unchanged (no scale-by-one pass).
template <typename T>
std::vector<T> clip_to_norm(std::vector<T> g, double clip_norm) {
  if (clip_norm <= 0) return g;
  const double n = l2_norm(g);
  if (n <= clip_norm) return g;
  const T s = static_cast<T>(clip_norm / n);
  for (T& x : g) x *= s;
  return g;
}

struct DpTransformStats {
  std::size_t microbatches = 0;
  std::size_t clipped = 0;
  double max_pre_clip_norm = 0.0;
};

template <typename T>
std::vector<T> dp_transform(const std::vector<std::vector<T>>& microbatch_grads,
                            const DpConfig& cfg, Rng& rng,
                            DpTransformStats* stats = nullptr) {
  if (microbatch_grads.empty()) throw ContractError("dp_transform: no microbatches");
  if (cfg.microbatch_size == 0) throw ContractError("dp_transform: zero microbatch size");
  const std::size_t dim = microbatch_grads.front().size();
  std::vector<T> acc(dim, T(0));
  if (stats) stats->microbatches = microbatch_grads.size();
  for (const auto& g : microbatch_grads) {
    if (g.size() != dim) throw ContractError("dp_transform: gradient size mismatch");
    if (cfg.enabled && cfg.clip_norm > 0) {
      const double n = l2_norm(g);
      if (stats) stats->max_pre_clip_norm = std::max(stats->max_pre_clip_norm, n);
      if (n > cfg.clip_norm) {
        if (stats) ++stats->clipped;
        const T s = static_cast<T>(cfg.clip_norm / n);
        for (std::size_t i = 0; i < dim; ++i) acc[i] += g[i] * s;
        continue;
      }
    }
    for (std::size_t i = 0; i < dim; ++i) acc[i] += g[i];
  }
  if (cfg.enabled && cfg.noise_std > 0) {
    const T sd = static_cast<T>(cfg.noise_std);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += sd * static_cast<T>(rng.normal());
  }
  const T inv =
      T(1) / static_cast<T>(microbatch_grads.size() * cfg.microbatch_size);
  for (T& x : acc) x *= inv;
  return acc;
}

// Named training arms for the privacy ablation.
struct DpArm {
  std::string name;
  DpConfig dp;
  std::size_t batch_override = 0;  // 0 keeps the run's batch size
};

const std::vector<DpArm>& dp_ablation_arms();
const DpArm& dp_arm(const std::string& name);
// The four non-baseline arms reported in the privacy study.
std::vector<std::string> dp_study_arm_names();

}  // namespace synthlearn
