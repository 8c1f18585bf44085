#pragma once

#include <string>

#include "synthlearn/network.hpp"

namespace synthlearn {

struct GradCheckResult {
  bool passed = false;
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  std::string worst_param;
};

// Central-difference check of analytic parameter gradients in eval mode.
// Samples distinct parameter indices; relative error uses the symmetric
// denominator max(|analytic| + |numeric|, 1e-8).
GradCheckResult finite_diff_check(Network<double>& net, const OutputLoss<double>& loss,
                                  const Tensor<double>& input, std::size_t samples, double tol,
                                  Rng& rng, double step = 1e-5);

}  // namespace synthlearn
