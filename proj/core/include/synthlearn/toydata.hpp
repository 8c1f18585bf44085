#pragma once

#include "synthlearn/pipeline.hpp"

namespace synthlearn {

// Procedural lateral-spine lookalikes: a vertical column of 5 to 8 rounded
// blocks over a soft gradient, with seven abnormal-finding subclasses that
// each add bright structure inside the central band. Generation is
// deterministic per (seed, index), so a shorter run is a prefix of a longer
// one.
struct ToyConfig {
  std::size_t count = 2000;
  std::size_t resolution = 64;
  std::size_t class_count = 2;  // 2: normal/abnormal, 8: finding subclasses
  double abnormal_fraction = 0.39;
  double noise_std = 0.02;
};

ImageDataset toy_generate(const ToyConfig& cfg, std::uint64_t seed);

// Mean intensity over the central band (x in [0.3, 0.7) W, y in [0.15, 0.85) H).
// A linear threshold on this statistic separates normal from abnormal well
// above chance; tests use it as a dataset sanity oracle.
double central_band_mean(const GrayImage& img);

}  // namespace synthlearn
