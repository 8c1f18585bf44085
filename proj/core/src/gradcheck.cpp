#include "synthlearn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace synthlearn {

GradCheckResult finite_diff_check(Network<double>& net, const OutputLoss<double>& loss,
                                  const Tensor<double>& input, std::size_t samples, double tol,
                                  Rng& rng, double step) {
  const std::size_t n = net.param_count();
  if (n == 0) throw ContractError("finite_diff_check: network has no parameters");

  std::vector<std::size_t> picks;
  if (samples >= n) {
    picks.resize(n);
    for (std::size_t i = 0; i < n; ++i) picks[i] = i;
  } else {
    std::vector<bool> taken(n, false);
    while (picks.size() < samples) {
      const std::size_t i = rng.uniform_int(n);
      if (!taken[i]) {
        taken[i] = true;
        picks.push_back(i);
      }
    }
  }

  const LossAndGradients<double> analytic = gradients(net, loss, input, Mode::Eval);

  GradCheckResult r;
  r.checked = picks.size();
  std::size_t worst_index = 0;
  std::vector<double>& params = net.params();
  for (const std::size_t i : picks) {
    const double saved = params[i];
    params[i] = saved + step;
    Tensor<double> out = net.forward(input, Mode::Eval);
    const double f_plus = loss.eval(out, nullptr);
    params[i] = saved - step;
    out = net.forward(input, Mode::Eval);
    const double f_minus = loss.eval(out, nullptr);
    params[i] = saved;

    const double numeric = (f_plus - f_minus) / (2.0 * step);
    const double a = analytic.param_grads[i];
    const double rel = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8);
    if (rel > r.max_rel_err) {
      r.max_rel_err = rel;
      worst_index = i;
    }
  }
  for (const auto& seg : net.param_index())
    if (worst_index >= seg.offset && worst_index < seg.offset + seg.size)
      r.worst_param = seg.name;
  r.passed = r.max_rel_err < tol;
  return r;
}

}  // namespace synthlearn
