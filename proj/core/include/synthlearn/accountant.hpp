#pragma once

#include <cstdint>
#include <vector>

namespace synthlearn {

// Renyi differential privacy of the Poisson-subsampled Gaussian mechanism.
//
// One step samples each record with probability q and adds Gaussian noise
// with multiplier sigma (noise std / clip norm) to the clipped sum. For
// integer order a the per-step RDP is
//
//   (1/(a-1)) * log sum_{i=0..a} C(a,i) q^i (1-q)^(a-i) exp(i(i-1)/(2 sigma^2))
//
// evaluated in log domain. q == 1 reduces to the Gaussian closed form
// a/(2 sigma^2). Non-integer orders use the chord bound: (a-1)*rdp(a) is
// interpolated linearly between the neighbouring integers, which upper-bounds
// the convex exact value. RDP composes additively over steps.
double rdp_subsampled_gaussian(double q, double sigma, double alpha);

// Orders scanned when converting to (epsilon, delta): integers 2..64 plus
// {128, 256}.
const std::vector<double>& default_rdp_orders();

struct EpsilonResult {
  double epsilon = 0.0;
  double order = 0.0;  // the order that attained the minimum (ties: smaller)
};

// epsilon = min over orders of rdp_total(a) + log(1/delta)/(a-1).
EpsilonResult epsilon_from_rdp(const std::vector<double>& orders,
                               const std::vector<double>& rdp_total, double delta);

// End-to-end: q = batch/dataset capped at 1, steps = images/batch.
EpsilonResult compute_epsilon(double q, double sigma, std::uint64_t steps, double delta);

double noise_multiplier(double noise_std, double clip_norm);

// delta = 1/N, the reciprocal-dataset-size convention.
double delta_default(std::uint64_t dataset_size);

struct PrivacyCurvePoint {
  std::uint64_t images_shown = 0;
  double epsilon = 0.0;
  double order = 0.0;
};

// Privacy spend at each checkpoint interval up to the training budget; the
// final budget point is always included.
std::vector<PrivacyCurvePoint> privacy_curve(std::uint64_t total_images,
                                             std::uint64_t interval, std::size_t batch,
                                             std::size_t dataset_size, double sigma,
                                             double delta);

struct NoiseSweepPoint {
  double noise_std = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double order = 0.0;  // alpha attaining the epsilon minimum
  bool selected = false;
};

// Epsilon across a strictly ascending noise-std grid at a fixed subsampling
// rate and step count; marks the selected operating point (see
// kNoiseSelectionRelativeDrop in the implementation for the pinned knee
// rule; the last grid point is selected when no earlier knee qualifies).
std::vector<NoiseSweepPoint> noise_selection_sweep(const std::vector<double>& noise_grid,
                                                   double clip_norm, double q,
                                                   std::uint64_t steps, double delta);

}  // namespace synthlearn
