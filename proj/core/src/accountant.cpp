#include "synthlearn/accountant.hpp"

#include <cmath>
#include <limits>

#include "synthlearn/common.hpp"

namespace synthlearn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Knee rule for the sweep: the operating point is the smallest grid value
// whose marginal epsilon reduction to the next grid step, as a fraction of
// the largest finite epsilon on the curve, drops below this threshold. Grid
// steps past the knee no longer buy a meaningful share of the total descent.
constexpr double kNoiseSelectionRelativeDrop = 0.05;

double rdp_integer(double q, double sigma, long alpha) {
  const double lnq = std::log(q);
  const double ln1q = std::log1p(-q);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  double log_a = -kInf;
  for (long i = 0; i <= alpha; ++i) {
    const double log_binom = std::lgamma(static_cast<double>(alpha) + 1.0) -
                             std::lgamma(static_cast<double>(i) + 1.0) -
                             std::lgamma(static_cast<double>(alpha - i) + 1.0);
    const double term = log_binom + static_cast<double>(i) * lnq +
                        static_cast<double>(alpha - i) * ln1q +
                        static_cast<double>(i) * static_cast<double>(i - 1) * inv2s2;
    log_a = log_add(log_a, term);
  }
  return log_a / (static_cast<double>(alpha) - 1.0);
}

}  // namespace

double rdp_subsampled_gaussian(double q, double sigma, double alpha) {
  if (q < 0 || q > 1) throw ContractError("rdp: sampling rate must be in [0, 1]");
  if (alpha <= 1) throw ContractError("rdp: order must exceed 1");
  if (q == 0) return 0.0;
  if (sigma <= 0) return kInf;
  if (q == 1) return alpha / (2.0 * sigma * sigma);

  const double floor_a = std::floor(alpha);
  if (floor_a == alpha) return rdp_integer(q, sigma, static_cast<long>(alpha));

  // chord bound on the convex map a -> (a-1) rdp(a)
  const long a1 = static_cast<long>(floor_a);
  const long a2 = a1 + 1;
  const double f1 = (static_cast<double>(a1) - 1.0) * rdp_integer(q, sigma, a1);
  const double f2 = (static_cast<double>(a2) - 1.0) * rdp_integer(q, sigma, a2);
  const double t = alpha - static_cast<double>(a1);
  return ((1.0 - t) * f1 + t * f2) / (alpha - 1.0);
}

const std::vector<double>& default_rdp_orders() {
  static const std::vector<double> orders = [] {
    std::vector<double> v;
    for (int a = 2; a <= 64; ++a) v.push_back(a);
    v.push_back(128);
    v.push_back(256);
    return v;
  }();
  return orders;
}

EpsilonResult epsilon_from_rdp(const std::vector<double>& orders,
                               const std::vector<double>& rdp_total, double delta) {
  if (orders.empty() || orders.size() != rdp_total.size())
    throw ContractError("epsilon_from_rdp: orders and rdp values must align");
  if (delta <= 0 || delta >= 1) throw ContractError("epsilon_from_rdp: delta must be in (0, 1)");
  EpsilonResult best{kInf, 0.0};
  const double log_inv_delta = std::log(1.0 / delta);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double eps = rdp_total[i] + log_inv_delta / (orders[i] - 1.0);
    if (eps < best.epsilon) best = {eps, orders[i]};
  }
  return best;
}

EpsilonResult compute_epsilon(double q, double sigma, std::uint64_t steps, double delta) {
  const auto& orders = default_rdp_orders();
  std::vector<double> total(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i)
    total[i] = static_cast<double>(steps) * rdp_subsampled_gaussian(q, sigma, orders[i]);
  return epsilon_from_rdp(orders, total, delta);
}

double noise_multiplier(double noise_std, double clip_norm) {
  if (clip_norm <= 0) throw ContractError("noise_multiplier: clip norm must be positive");
  if (noise_std < 0) throw ContractError("noise_multiplier: noise std must be nonnegative");
  return noise_std / clip_norm;
}

double delta_default(std::uint64_t dataset_size) {
  if (dataset_size == 0) throw ContractError("delta_default: empty dataset");
  return 1.0 / static_cast<double>(dataset_size);
}

std::vector<PrivacyCurvePoint> privacy_curve(std::uint64_t total_images,
                                             std::uint64_t interval, std::size_t batch,
                                             std::size_t dataset_size, double sigma,
                                             double delta) {
  if (interval == 0 || batch == 0 || dataset_size == 0)
    throw ContractError("privacy_curve: interval, batch and dataset must be positive");
  const double q = std::min(1.0, static_cast<double>(batch) / static_cast<double>(dataset_size));
  std::vector<PrivacyCurvePoint> curve;
  for (std::uint64_t images = interval;; images += interval) {
    const bool last = images >= total_images;
    const std::uint64_t at = last ? total_images : images;
    const EpsilonResult e = compute_epsilon(q, sigma, at / batch, delta);
    curve.push_back({at, e.epsilon, e.order});
    if (last) break;
  }
  return curve;
}

std::vector<NoiseSweepPoint> noise_selection_sweep(const std::vector<double>& noise_grid,
                                                   double clip_norm, double q,
                                                   std::uint64_t steps, double delta) {
  if (noise_grid.empty()) throw ContractError("noise sweep: empty grid");
  for (std::size_t i = 1; i < noise_grid.size(); ++i)
    if (noise_grid[i] <= noise_grid[i - 1])
      throw ContractError("noise sweep: grid must be strictly ascending");
  std::vector<NoiseSweepPoint> points;
  for (const double noise : noise_grid) {
    NoiseSweepPoint p;
    p.noise_std = noise;
    p.sigma = noise_multiplier(noise, clip_norm);
    const EpsilonResult e = compute_epsilon(q, p.sigma, steps, delta);
    p.epsilon = e.epsilon;
    p.order = e.order;
    points.push_back(p);
  }
  double reference = kInf;
  for (const auto& p : points)
    if (std::isfinite(p.epsilon)) {
      reference = p.epsilon;
      break;
    }
  std::size_t chosen = points.size() - 1;  // the last point has no next step
  if (std::isfinite(reference) && reference > 0)
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
      if (!std::isfinite(points[i].epsilon)) continue;
      const double drop = (points[i].epsilon - points[i + 1].epsilon) / reference;
      if (drop < kNoiseSelectionRelativeDrop) {
        chosen = i;
        break;
      }
    }
  points[chosen].selected = true;
  return points;
}

}  // namespace synthlearn
