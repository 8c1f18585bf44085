// Acceptance harness: nine release criteria, each printing exactly one
// "criterion N PASS|FAIL: detail" line on stdout (progress goes to stderr).
// Expensive artifacts (toy datasets, the shared classifier, GAN training
// runs) are cached in the work directory behind .complete markers, so the
// training-heavy criteria reuse each other's runs across invocations.
//
// Usage: acceptance [--criterion N] [--work-dir DIR] [--cli PATH]
//   --criterion 0 (default) runs all nine.
//   --cli names the command-line binary; only criterion 9 needs it.
#include <sys/wait.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "synthlearn/accountant.hpp"
#include "synthlearn/checkpoint.hpp"
#include "synthlearn/config.hpp"
#include "synthlearn/csv.hpp"
#include "synthlearn/dp.hpp"
#include "synthlearn/eval.hpp"
#include "synthlearn/gan.hpp"
#include "synthlearn/gradcheck.hpp"
#include "synthlearn/manifest.hpp"
#include "synthlearn/metrics.hpp"
#include "synthlearn/pipeline.hpp"
#include "synthlearn/toydata.hpp"

namespace fs = std::filesystem;
using namespace synthlearn;

namespace {

// ---------------------------------------------------------------------------
// Pinned experiment constants. The full/early budgets define the matched
// checkpoints compared by criteria 7 and 8; checkpoint_interval equals the
// early budget so full-length runs emit the shared early checkpoint.
// ---------------------------------------------------------------------------
constexpr std::uint64_t kFullBudget = 20000;
constexpr std::uint64_t kEarlyBudget = 4000;
const std::vector<std::uint64_t> kGanSeeds = {401, 402, 403};
constexpr std::uint64_t kTrainDataSeed = 1001;
constexpr std::uint64_t kTestDataSeed = 1002;
constexpr std::uint64_t kClassifierSeed = 1003;
constexpr std::uint64_t kIdentitySeed = 1700;
constexpr std::uint64_t kMetricSeed = 7001;
constexpr std::size_t kMetricSamples = 500;
constexpr std::size_t kMetricKnnK = 3;

struct Ctx {
  fs::path work;
  std::string cli;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Artifact cache: a directory is valid once its .complete marker exists; the
// marker stores the build wall time in seconds. Aborted builds leave no
// marker and are wiped on the next attempt.
// ---------------------------------------------------------------------------
fs::path marker_path(const fs::path& dir) { return fs::path(dir.string() + ".complete"); }

double completed_seconds(const fs::path& dir) {
  std::ifstream in(marker_path(dir));
  double s = 0.0;
  in >> s;
  return in ? s : 0.0;
}

template <typename Fn>
void ensure(const fs::path& dir, Fn&& build) {
  if (fs::exists(marker_path(dir))) return;
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto t0 = std::chrono::steady_clock::now();
  build();
  const double secs = seconds_since(t0);
  std::ofstream out(marker_path(dir));
  out << secs << "\n";
  std::cerr << "[acceptance] built " << dir.filename().string() << " in " << fmt(secs, 3)
            << " s\n";
}

// ---------------------------------------------------------------------------
// Shared fixtures: toy train/test datasets and one abnormality classifier
// that serves as both the domain-loss network and the metric feature
// extractor.
// ---------------------------------------------------------------------------
NormalizeSpec classifier_norm() {
  NormalizeSpec n;
  n.resolution = 32;
  return n;
}

ClassifierTrainConfig classifier_config() {
  ClassifierTrainConfig c;
  c.resolution = 32;
  c.widths = {16, 32, 64};
  c.epochs = 12;
  c.batch = 32;
  return c;
}

struct Shared {
  ImageDataset train, test;
  Model<float> extractor;
  NormalizeSpec norm = classifier_norm();
};

Shared& shared_fixtures(Ctx& ctx) {
  static std::optional<Shared> cache;
  if (cache) return *cache;

  const fs::path train_dir = ctx.work / "data_train";
  const fs::path test_dir = ctx.work / "data_test";
  ensure(train_dir, [&] {
    ToyConfig tc;
    tc.count = 2000;
    tc.resolution = 64;
    save_dataset(train_dir.string(), toy_generate(tc, kTrainDataSeed));
  });
  ensure(test_dir, [&] {
    ToyConfig tc;
    tc.count = 500;
    tc.resolution = 64;
    save_dataset(test_dir.string(), toy_generate(tc, kTestDataSeed));
  });

  Shared s;
  s.train = load_dataset(train_dir.string());
  s.test = load_dataset(test_dir.string());

  const fs::path cls_dir = ctx.work / "classifier";
  ensure(cls_dir, [&] {
    std::cerr << "[acceptance] training shared classifier\n";
    ClassifierTrainResult r = train_classifier(classifier_config(), s.train, kClassifierSeed);
    save_checkpoint((cls_dir / "classifier.ckpt").string(), r.model, CheckpointMeta{});
  });
  s.extractor = load_checkpoint((cls_dir / "classifier.ckpt").string()).model;
  cache = std::move(s);
  return *cache;
}

// ---------------------------------------------------------------------------
// GAN run inventory shared by criteria 6 to 8.
// ---------------------------------------------------------------------------
struct GanPlan {
  std::string name;
  double gamma = 0.0;
  bool use_domain = false;
  std::string dp_arm_name;  // named privacy arm, empty for none
  std::uint64_t budget = kEarlyBudget;
};

GanPlan gan_plan(const std::string& variant) {
  if (variant == "domain") return {"domain", 0.01, true, "", kFullBudget};
  if (variant == "baseline") return {"baseline", 0.0, false, "", kFullBudget};
  if (variant == "overweight") return {"overweight", 0.05, true, "", kEarlyBudget};
  return {variant, 0.0, false, variant, kEarlyBudget};
}

fs::path ensure_gan(Ctx& ctx, Shared& sh, const std::string& variant, std::uint64_t seed) {
  const GanPlan plan = gan_plan(variant);
  const fs::path dir = ctx.work / ("gan_" + plan.name + "_s" + std::to_string(seed));
  ensure(dir, [&] {
    GanTrainConfig g;
    g.resolution = 64;
    g.class_count = 2;
    g.batch = 16;
    g.budget_images = plan.budget;
    g.checkpoint_interval = kEarlyBudget;
    g.gamma = plan.gamma;
    g.normalize = sh.norm;
    if (!plan.dp_arm_name.empty()) {
      const DpArm& arm = dp_arm(plan.dp_arm_name);
      g.dp = arm.dp;
      if (arm.batch_override) g.batch = arm.batch_override;
    }
    std::cerr << "[acceptance] training " << dir.filename().string() << " (" << plan.budget
              << " images, batch " << g.batch << ")\n";
    train_gan(g, sh.train, plan.use_domain ? &sh.extractor : nullptr, dir.string(), seed);
  });
  return dir;
}

// Checkpoint FID/precision/recall for one run, cached as CSV inside the run
// directory (the evaluation parameters are process constants).
std::map<std::uint64_t, CheckpointEval> checkpoint_metrics(Shared& sh, const fs::path& run_dir) {
  const fs::path cache = run_dir / "acceptance_metrics.csv";
  if (!fs::exists(cache)) {
    std::cerr << "[acceptance] scoring checkpoints in " << run_dir.filename().string() << "\n";
    const auto evals = evaluate_checkpoints(run_dir.string(), sh.train, sh.extractor, sh.norm,
                                            kMetricSamples, kMetricSeed, kMetricKnnK);
    CsvWriter w({"images_shown", "fid", "precision", "recall"});
    for (const auto& e : evals)
      w.row({std::to_string(e.images_shown), format_double(e.fid, 17),
             format_double(e.precision, 17), format_double(e.recall, 17)});
    w.write(cache.string());
  }
  CsvTable t = read_csv(cache.string());
  const std::size_t ci = t.column_index("images_shown");
  const std::size_t cf = t.column_index("fid");
  const std::size_t cp = t.column_index("precision");
  const std::size_t cr = t.column_index("recall");
  std::map<std::uint64_t, CheckpointEval> by_images;
  for (const auto& row : t.rows) {
    CheckpointEval e;
    e.images_shown = std::stoull(row[ci]);
    e.fid = std::stod(row[cf]);
    e.precision = std::stod(row[cp]);
    e.recall = std::stod(row[cr]);
    by_images[e.images_shown] = e;
  }
  return by_images;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---------------------------------------------------------------------------
// Criterion 1: finite-difference gradient checks for every loss, in double
// precision, five seeds each, tolerance 1e-4.
// ---------------------------------------------------------------------------
Outcome criterion1(Ctx&) {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr double kTol = 1e-4;
  constexpr std::size_t kProbes = 24;
  double worst = 0.0;
  std::size_t checked = 0;
  bool all = true;

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(derive_seed(seed, "acceptance/gradcheck"));

    {  // class-weighted BCE through the abnormality classifier
      ArchitectureSpec spec = default_classifier_spec(32);
      spec.widths = {4, 6, 8};
      Model<double> cls = build_model<double>(spec, seed);
      Tensor<double> input({3, 3, 32, 32});
      for (std::size_t i = 0; i < input.count(); ++i) input[i] = rng.normal();
      WeightedBceLoss<double> loss({0, 1, 1}, 0.82, 1.28);
      const GradCheckResult r = finite_diff_check(cls.net, loss, input, kProbes, kTol, rng);
      worst = std::max(worst, r.max_rel_err);
      checked += r.checked;
      all = all && r.passed;
    }

    {  // discriminator adversarial loss (real then fake logits)
      ArchitectureSpec spec = default_discriminator_spec(32, 2);
      spec.widths = {4, 6, 8};
      Model<double> disc = build_model<double>(spec, seed + 10);
      Tensor<double> images({4, 1, 32, 32});
      for (std::size_t i = 0; i < images.count(); ++i) images[i] = std::tanh(rng.normal());
      const std::vector<std::size_t> ids = {0, 1, 1, 0};
      Tensor<double> d_in = discriminator_input(images, ids, 2);
      DiscriminatorLoss<double> loss(2);
      const GradCheckResult r = finite_diff_check(disc.net, loss, d_in, kProbes, kTol, rng);
      worst = std::max(worst, r.max_rel_err);
      checked += r.checked;
      all = all && r.passed;
    }

    ArchitectureSpec gspec = default_generator_spec(32, 2, 8);
    gspec.widths = {8, 6, 4, 4};
    ArchitectureSpec dspec = default_discriminator_spec(32, 2);
    dspec.widths = {4, 4, 6};
    Model<double> gen = build_model<double>(gspec, seed + 20);
    Model<double> disc = build_model<double>(dspec, seed + 30);
    const std::vector<std::size_t> ids = {0, 1, 1};
    const std::vector<int> targets = {0, 1, 1};
    Tensor<double> latents({3, 8});
    for (std::size_t i = 0; i < latents.count(); ++i) latents[i] = rng.normal();
    Tensor<double> g_in = generator_input(latents, ids, 2);

    {  // generator adversarial loss with the augmentation pipeline in graph
      const AdaApplication<double> ada =
          sample_ada_application<double>(AdaConfig{}, 3, 32, 0.7, rng);
      GeneratorLoss<double> loss(disc, ids, targets, 0.0, nullptr, NormalizeSpec{}, &ada);
      const GradCheckResult r = finite_diff_check(gen.net, loss, g_in, kProbes, kTol, rng);
      worst = std::max(worst, r.max_rel_err);
      checked += r.checked;
      all = all && r.passed;
    }

    {  // full generator loss: adversarial plus the domain-consistency term
      // through the differentiable resize/normalize path (32 -> 64)
      ArchitectureSpec sspec = default_classifier_spec(64);
      sspec.widths = {4, 6, 8};
      Model<double> domain = build_model<double>(sspec, seed + 40);
      NormalizeSpec norm;
      norm.resolution = 64;
      const AdaApplication<double> ada =
          sample_ada_application<double>(AdaConfig{}, 3, 32, 0.7, rng);
      GeneratorLoss<double> loss(disc, ids, targets, 0.01, &domain, norm, &ada);
      const GradCheckResult r = finite_diff_check(gen.net, loss, g_in, kProbes, kTol, rng);
      worst = std::max(worst, r.max_rel_err);
      checked += r.checked;
      all = all && r.passed;
    }
  }

  const double secs = seconds_since(t0);
  const bool pass = all && worst < kTol && secs < 60.0;
  return {pass, "4 losses x 5 seeds, " + std::to_string(checked) +
                    " parameter probes, max rel err " + fmt(worst, 3) + " (tol 1e-4), " +
                    fmt(secs, 3) + " s (limit 60)"};
}

// ---------------------------------------------------------------------------
// Criterion 2: DP transform invariants in 32-bit mode.
// ---------------------------------------------------------------------------
Outcome criterion2(Ctx&) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(2, "acceptance/dp"));

  // post-clip norms over 1e4 random gradients
  double max_post = 0.0;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < 10000; ++i) {
    const std::size_t dim = 4 + rng.uniform_int(60);
    std::vector<float> g(dim);
    const double scale = std::exp(rng.uniform(-2.0, 2.0));
    for (float& x : g) x = static_cast<float>(scale * rng.normal());
    if (l2_norm(g) > 1.5) ++clipped;
    max_post = std::max(max_post, l2_norm(clip_to_norm(g, 1.5)));
  }
  const bool norms_ok = max_post <= 1.5 + 1e-6;

  // noise std over 1e5 elements within 1% of 0.2: a single zero-gradient
  // microbatch isolates the additive noise exactly
  const std::vector<std::vector<float>> zero = {std::vector<float>(100000, 0.0f)};
  DpConfig noisy;
  noisy.enabled = true;
  noisy.clip_norm = 1.5;
  noisy.noise_std = 0.2;
  noisy.microbatch_size = 1;
  Rng noise_rng(derive_seed(3, "acceptance/dp-noise"));
  const std::vector<float> noised = dp_transform(zero, noisy, noise_rng);
  double mean = 0.0;
  for (float v : noised) mean += v;
  mean /= static_cast<double>(noised.size());
  double var = 0.0;
  for (float v : noised) var += (v - mean) * (v - mean);
  const double noise_std = std::sqrt(var / static_cast<double>(noised.size() - 1));
  const bool noise_ok = std::abs(noise_std - 0.2) <= 0.002;

  // fully disabled transform equals the plain averaged gradient bit-for-bit,
  // both via the master switch and via zeroed clip/noise
  std::vector<std::vector<float>> grads(7, std::vector<float>(311));
  for (auto& g : grads)
    for (float& x : g) x = static_cast<float>(rng.normal() * 3.0);
  std::vector<float> plain(311, 0.0f);
  for (const auto& g : grads)
    for (std::size_t i = 0; i < plain.size(); ++i) plain[i] += g[i];
  const float inv = 1.0f / static_cast<float>(grads.size() * 2);
  for (float& x : plain) x *= inv;

  DpConfig off_master;
  off_master.enabled = false;
  off_master.clip_norm = 1.5;
  off_master.noise_std = 0.2;
  off_master.microbatch_size = 2;
  DpConfig off_fields;
  off_fields.enabled = true;
  off_fields.clip_norm = 0.0;
  off_fields.noise_std = 0.0;
  off_fields.microbatch_size = 2;
  Rng ra(99), rb(99);
  const std::vector<float> via_master = dp_transform(grads, off_master, ra);
  const std::vector<float> via_fields = dp_transform(grads, off_fields, rb);
  auto bit_equal = [](const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::bit_cast<std::uint32_t>(a[i]) != std::bit_cast<std::uint32_t>(b[i])) return false;
    return true;
  };
  const bool ident_ok = bit_equal(via_master, plain) && bit_equal(via_fields, plain) &&
                        ra.serialize() == Rng(99).serialize();

  const double secs = seconds_since(t0);
  const bool pass = norms_ok && noise_ok && ident_ok && secs < 60.0;
  return {pass, "max post-clip norm " + fmt(max_post, 8) + " over 1e4 gradients (" +
                    std::to_string(clipped) + " clipped), noise std " + fmt(noise_std, 5) +
                    " vs 0.2 over 1e5 elements, disabled transform bit-identical: " +
                    (ident_ok ? "yes" : "NO") + ", " + fmt(secs, 3) + " s (limit 60)"};
}

// ---------------------------------------------------------------------------
// Criterion 3: privacy accountant against closed forms, an independent
// quadrature oracle, monotonicity, pinned constants, and the published curve.
// ---------------------------------------------------------------------------

// Quadrature reference for integer-order subsampled-Gaussian RDP:
// (1/(a-1)) log E_{x~N(0,s^2)}[((1-q) + q e^{(2x-1)/(2s^2)})^a], integrated
// with Simpson's rule in log space (the integrand spans thousands of orders
// of magnitude).
double quadrature_rdp(double q, double sigma, int alpha) {
  const double s2 = sigma * sigma;
  const double lo = -1.0 - 12.0 * sigma;
  const double hi = static_cast<double>(alpha) + 1.0 + 12.0 * sigma;
  const std::size_t intervals = 20000;
  const double h = (hi - lo) / static_cast<double>(intervals);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double log_norm = -std::log(sigma) - 0.5 * std::log(kTwoPi);
  std::vector<double> terms(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double y = (2.0 * x - 1.0) / (2.0 * s2);
    const double mix = y > 0.0 ? y + std::log(q + (1.0 - q) * std::exp(-y))
                               : std::log((1.0 - q) + q * std::exp(y));
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    terms[i] =
        log_norm - x * x / (2.0 * s2) + static_cast<double>(alpha) * mix + std::log(w);
  }
  const double m = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  const double log_integral = std::log(h / 3.0) + m + std::log(acc);
  return log_integral / (static_cast<double>(alpha) - 1.0);
}

Outcome criterion3(Ctx&) {
  const auto t0 = std::chrono::steady_clock::now();

  // q = 1 closed form a/(2 sigma^2) to 1e-10
  double worst_q1 = 0.0;
  for (double sigma : {0.3, 0.5, 1.0, 2.0, 4.0})
    for (double alpha : {2.0, 3.5, 7.0, 17.0, 64.0, 256.0})
      worst_q1 = std::max(worst_q1, std::abs(rdp_subsampled_gaussian(1.0, sigma, alpha) -
                                             alpha / (2.0 * sigma * sigma)));
  const bool q1_ok = worst_q1 <= 1e-10;

  // integer-order RDP vs the quadrature oracle on 50 random triples
  Rng rng(derive_seed(5, "acceptance/accountant"));
  double worst_rel = 0.0;
  for (std::size_t i = 0; i < 50; ++i) {
    const double q = std::exp(rng.uniform(std::log(1e-4), std::log(0.5)));
    const double sigma = rng.uniform(0.3, 3.0);
    const int alpha = 2 + static_cast<int>(rng.uniform_int(31));
    const double ref = quadrature_rdp(q, sigma, alpha);
    const double got = rdp_subsampled_gaussian(q, sigma, alpha);
    worst_rel = std::max(worst_rel, std::abs(got - ref) / std::max(std::abs(ref), 1e-300));
  }
  const bool oracle_ok = worst_rel < 1e-6;

  // epsilon monotone: non-increasing in sigma and delta, non-decreasing in
  // steps and q, over 100 random tuples
  std::size_t violations = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const double q = std::exp(rng.uniform(std::log(1e-4), std::log(0.5)));
    const double sigma = rng.uniform(0.4, 3.0);
    const double delta = std::exp(rng.uniform(std::log(1e-7), std::log(1e-3)));
    const std::uint64_t steps = 10 + rng.uniform_int(100000);
    const double eps = compute_epsilon(q, sigma, steps, delta).epsilon;
    if (compute_epsilon(q, sigma * 1.3, steps, delta).epsilon > eps + 1e-9) ++violations;
    if (compute_epsilon(q, sigma, steps, delta * 3.0).epsilon > eps + 1e-9) ++violations;
    if (compute_epsilon(std::min(1.0, q * 1.5), sigma, steps, delta).epsilon < eps - 1e-9)
      ++violations;
    if (compute_epsilon(q, sigma, steps * 2, delta).epsilon < eps - 1e-9) ++violations;
  }
  const bool mono_ok = violations == 0;

  // pinned constants
  const bool nm_ok = std::abs(noise_multiplier(0.2, 1.5) - 0.2 / 1.5) <= 1e-12;
  const bool delta_ok = std::llround(delta_default(3773) * 1e6) == 265;

  // published noise grid: strictly decreasing epsilon, knee selected at 0.2
  const std::vector<double> grid = expand_grid("0.03, 0.06, 0.1, 0.2, 0.3, ..., 1.5");
  const auto sweep = noise_selection_sweep(grid, 1.5, 1.0 / 3773.0, 4200000, 1.0 / 3773.0);
  bool curve_ok = sweep.size() == 17;
  double selected_noise = -1.0;
  for (std::size_t i = 0; curve_ok && i + 1 < sweep.size(); ++i)
    curve_ok = sweep[i].epsilon > sweep[i + 1].epsilon;
  for (const auto& p : sweep)
    if (p.selected) selected_noise = p.noise_std;
  curve_ok = curve_ok && selected_noise == 0.2;

  const double secs = seconds_since(t0);
  const bool pass = q1_ok && oracle_ok && mono_ok && nm_ok && delta_ok && curve_ok &&
                    secs < 300.0;
  return {pass, "q=1 max err " + fmt(worst_q1, 3) + ", quadrature max rel err " +
                    fmt(worst_rel, 3) + " over 50 triples, " + std::to_string(violations) +
                    " monotonicity violations in 400 comparisons, sigma(0.2,1.5) and " +
                    "delta(3773) pinned: " + (nm_ok && delta_ok ? "yes" : "NO") +
                    ", 17-point curve strictly decreasing with knee at 0.2: " +
                    (curve_ok ? "yes" : "NO") + ", " + fmt(secs, 3) + " s (limit 300)"};
}

// ---------------------------------------------------------------------------
// Criterion 4: closed-form and brute-force oracles for FID, k-NN
// precision/recall, and ROC AUC.
// ---------------------------------------------------------------------------
double oracle_sq_dist(const float* a, const float* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    acc += diff * diff;
  }
  return acc;
}

PrecisionRecall oracle_precision_recall(const Tensor<float>& real, const Tensor<float>& gen,
                                        std::size_t k) {
  const std::size_t d = real.dim(1);
  auto radii = [&](const Tensor<float>& f) {
    const std::size_t n = f.dim(0);
    std::vector<double> out(n);
    std::vector<double> dists;
    for (std::size_t i = 0; i < n; ++i) {
      dists.clear();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) dists.push_back(oracle_sq_dist(f.ptr() + i * d, f.ptr() + j * d, d));
      std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
      out[i] = dists[k - 1];
    }
    return out;
  };
  auto covered = [&](const Tensor<float>& queries, const Tensor<float>& support,
                     const std::vector<double>& sq_radii) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < queries.dim(0); ++i)
      for (std::size_t j = 0; j < support.dim(0); ++j)
        if (oracle_sq_dist(queries.ptr() + i * d, support.ptr() + j * d, d) <= sq_radii[j]) {
          ++hit;
          break;
        }
    return static_cast<double>(hit) / static_cast<double>(queries.dim(0));
  };
  const auto rr = radii(real);
  const auto gr = radii(gen);
  return {covered(gen, real, rr), covered(real, gen, gr)};
}

double oracle_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pos = 0, neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    ++pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  neg = scores.size() - pos;
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

Outcome criterion4(Ctx&) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(derive_seed(7, "acceptance/metrics"));

  // FID of a feature set against itself
  Tensor<float> x({40, 8});
  for (std::size_t i = 0; i < x.count(); ++i) x[i] = static_cast<float>(rng.normal());
  const double self_fid = std::abs(fid(x, x));
  const bool self_ok = self_fid < 1e-6;

  // 1-D FID closed form over five random instances
  double worst_1d = 0.0;
  for (std::size_t t = 0; t < 5; ++t) {
    Tensor<float> a({40 + rng.uniform_int(40), 1});
    Tensor<float> b({40 + rng.uniform_int(40), 1});
    for (std::size_t i = 0; i < a.count(); ++i)
      a[i] = static_cast<float>(rng.normal() * 2.0 + 1.0);
    for (std::size_t i = 0; i < b.count(); ++i)
      b[i] = static_cast<float>(rng.normal() * 0.7 - 0.5);
    const MomentStats ma = feature_moments(a);
    const MomentStats mb = feature_moments(b);
    const double dm = ma.mean[0] - mb.mean[0];
    const double ds = std::sqrt(ma.cov[0]) - std::sqrt(mb.cov[0]);
    worst_1d = std::max(worst_1d, std::abs(fid(a, b) - (dm * dm + ds * ds)));
  }
  const bool one_d_ok = worst_1d < 1e-6;

  // k-NN precision/recall equals the brute-force oracle exactly; dyadic
  // coordinates keep every squared distance exactly representable
  std::size_t pr_mismatch = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t k = 1 + rng.uniform_int(4);
    const std::size_t n_real = k + 2 + rng.uniform_int(49 - k);
    const std::size_t n_gen = k + 2 + rng.uniform_int(49 - k);
    const std::size_t d = 2 + rng.uniform_int(5);
    Tensor<float> real({n_real, d}), gen({n_gen, d});
    for (std::size_t i = 0; i < real.count(); ++i)
      real[i] = static_cast<float>(rng.uniform_int(33)) / 4.0f;
    for (std::size_t i = 0; i < gen.count(); ++i)
      gen[i] = static_cast<float>(rng.uniform_int(33)) / 4.0f;
    const PrecisionRecall got = knn_precision_recall(real, gen, k);
    const PrecisionRecall ref = oracle_precision_recall(real, gen, k);
    if (got.precision != ref.precision || got.recall != ref.recall) ++pr_mismatch;
  }

  // ROC AUC equals the all-pairs oracle exactly; dyadic scores force ties
  std::size_t auc_mismatch = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.uniform_int(199);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.uniform_int(16)) / 8.0;
      labels[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    labels[0] = 0;
    labels[n - 1] = 1;
    if (roc_auc(scores, labels) != oracle_auc(scores, labels)) ++auc_mismatch;
  }

  const double secs = seconds_since(t0);
  const bool pass =
      self_ok && one_d_ok && pr_mismatch == 0 && auc_mismatch == 0 && secs < 120.0;
  return {pass, "self FID " + fmt(self_fid, 3) + ", 1-D closed-form max err " +
                    fmt(worst_1d, 3) + ", precision/recall mismatches " +
                    std::to_string(pr_mismatch) + "/100, AUC mismatches " +
                    std::to_string(auc_mismatch) + "/100, " + fmt(secs, 3) +
                    " s (limit 120)"};
}

// ---------------------------------------------------------------------------
// Criterion 5: gamma = 0 training is bit-identical to the baseline GAN at
// equal seeds, checked by checkpoint file hashes after 1000 images.
// ---------------------------------------------------------------------------
Outcome criterion5(Ctx& ctx) {
  Shared& sh = shared_fixtures(ctx);
  auto run = [&](const fs::path& dir, bool with_classifier) {
    ensure(dir, [&] {
      GanTrainConfig g;
      g.resolution = 64;
      g.class_count = 2;
      g.batch = 8;
      g.budget_images = 1000;
      g.checkpoint_interval = 1000;
      g.gamma = 0.0;
      g.normalize = sh.norm;
      std::cerr << "[acceptance] training " << dir.filename().string() << " (1000 images)\n";
      train_gan(g, sh.train, with_classifier ? &sh.extractor : nullptr, dir.string(),
                kIdentitySeed);
    });
  };
  const fs::path base = ctx.work / "identity_baseline";
  const fs::path gamma0 = ctx.work / "identity_gamma0";
  run(base, false);
  run(gamma0, true);

  std::string mismatch;
  for (const char* f : {"g_000001000.ckpt", "g_final.ckpt", "d_final.ckpt"})
    if (file_hash_hex((base / f).string()) != file_hash_hex((gamma0 / f).string()))
      mismatch += std::string(mismatch.empty() ? "" : ", ") + f;

  const double build_secs = completed_seconds(base) + completed_seconds(gamma0);
  const bool pass = mismatch.empty() && build_secs < 300.0;
  return {pass, mismatch.empty()
                    ? "generator and discriminator checkpoint hashes identical after 1000 "
                      "images (g_000001000, g_final, d_final), built in " +
                          fmt(build_secs, 3) + " s (limit 300)"
                    : "hash mismatch in: " + mismatch};
}

// ---------------------------------------------------------------------------
// Criterion 6: desk-scale synthetic-learning analogue. Median-of-3-seeds
// test AUC: real-only >= 0.90 and synthetic-only (10000 sampled images)
// >= 0.9 x real-only.
// ---------------------------------------------------------------------------
Outcome criterion6(Ctx& ctx) {
  Shared& sh = shared_fixtures(ctx);
  std::vector<double> real_auc, synth_auc;
  double slowest_gan = 0.0;

  for (const std::uint64_t seed : kGanSeeds) {
    const fs::path gan = ensure_gan(ctx, sh, "domain", seed);
    slowest_gan = std::max(slowest_gan, completed_seconds(gan));

    const fs::path cache = ctx.work / ("matrix_s" + std::to_string(seed) + ".csv");
    if (!fs::exists(cache)) {
      std::cerr << "[acceptance] matrix replicate, seed " << seed << "\n";
      std::vector<ExperimentArm> arms;
      for (const auto& a : default_experiment_arms())
        if (a.name == "real" || a.name == "synth_domain_10000") arms.push_back(a);
      const MatrixResult mr =
          run_matrix(classifier_config(), arms,
                     {{"domain", (gan / "g_final.ckpt").string()}}, sh.train, sh.test, {seed});
      CsvWriter w({"arm", "auc"});
      for (const auto& row : mr.rows) w.row({row.arm, format_double(row.auc, 17)});
      w.write(cache.string());
    }
    const CsvTable t = read_csv(cache.string());
    const std::size_t ca = t.column_index("arm"), cv = t.column_index("auc");
    for (const auto& row : t.rows) {
      if (row[ca] == "real") real_auc.push_back(std::stod(row[cv]));
      if (row[ca] == "synth_domain_10000") synth_auc.push_back(std::stod(row[cv]));
    }
  }

  if (real_auc.size() != 3 || synth_auc.size() != 3)
    return {false, "expected 3 replicates per arm, found " + std::to_string(real_auc.size()) +
                       " real and " + std::to_string(synth_auc.size()) + " synthetic"};
  const double med_real = median3(real_auc);
  const double med_synth = median3(synth_auc);
  const bool pass = med_real >= 0.90 && med_synth >= 0.9 * med_real && slowest_gan <= 3600.0;
  return {pass, "median real-only AUC " + fmt(med_real) + " (floor 0.90), median " +
                    "synthetic-only AUC " + fmt(med_synth) + " (floor " +
                    fmt(0.9 * med_real) + "), slowest GAN build " + fmt(slowest_gan, 3) +
                    " s (limit 3600)"};
}

// ---------------------------------------------------------------------------
// Criterion 7: domain-loss direction. Median recall(gamma 0.01) >= median
// recall(gamma 0) at the final matched checkpoint; the gamma 0.05 overweight
// run has strictly worse FID at the first checkpoint.
// ---------------------------------------------------------------------------
Outcome criterion7(Ctx& ctx) {
  Shared& sh = shared_fixtures(ctx);
  std::vector<double> rec_domain, rec_base, fid_domain_first, fid_over_first;
  for (const std::uint64_t seed : kGanSeeds) {
    auto domain = checkpoint_metrics(sh, ensure_gan(ctx, sh, "domain", seed));
    auto base = checkpoint_metrics(sh, ensure_gan(ctx, sh, "baseline", seed));
    auto over = checkpoint_metrics(sh, ensure_gan(ctx, sh, "overweight", seed));
    rec_domain.push_back(domain.at(kFullBudget).recall);
    rec_base.push_back(base.at(kFullBudget).recall);
    fid_domain_first.push_back(domain.at(kEarlyBudget).fid);
    fid_over_first.push_back(over.at(kEarlyBudget).fid);
  }
  const double mr_dom = median3(rec_domain), mr_base = median3(rec_base);
  const double mf_dom = median3(fid_domain_first), mf_over = median3(fid_over_first);
  const bool recall_ok = mr_dom >= mr_base;
  const bool overweight_ok = mf_over > mf_dom;
  return {recall_ok && overweight_ok,
          "median recall at " + std::to_string(kFullBudget) + " images: domain " +
              fmt(mr_dom) + " vs baseline " + fmt(mr_base) + " (need >=), median FID at " +
              std::to_string(kEarlyBudget) + ": gamma 0.05 " + fmt(mf_over) +
              " vs gamma 0.01 " + fmt(mf_dom) + " (need strictly worse)"};
}

// ---------------------------------------------------------------------------
// Criterion 8: privacy-arm direction at the shared early checkpoint.
// ---------------------------------------------------------------------------
Outcome criterion8(Ctx& ctx) {
  Shared& sh = shared_fixtures(ctx);
  std::vector<double> fid_base, fid_full, fid_lownoise, fid_cliponly;
  for (const std::uint64_t seed : kGanSeeds) {
    fid_base.push_back(
        checkpoint_metrics(sh, ensure_gan(ctx, sh, "baseline", seed)).at(kEarlyBudget).fid);
    fid_full.push_back(
        checkpoint_metrics(sh, ensure_gan(ctx, sh, "dp_full", seed)).at(kEarlyBudget).fid);
    fid_lownoise.push_back(
        checkpoint_metrics(sh, ensure_gan(ctx, sh, "dp_noise_0.02", seed))
            .at(kEarlyBudget)
            .fid);
    fid_cliponly.push_back(
        checkpoint_metrics(sh, ensure_gan(ctx, sh, "dp_cliponly", seed)).at(kEarlyBudget).fid);
  }
  const double base = median3(fid_base), full = median3(fid_full);
  const double lownoise = median3(fid_lownoise), cliponly = median3(fid_cliponly);
  const bool noise_hurts = full >= 2.0 * base;
  const bool lower_noise_helps = lownoise <= full;
  const bool clip_benign = cliponly <= 1.5 * base;
  return {noise_hurts && lower_noise_helps && clip_benign,
          "median FID at " + std::to_string(kEarlyBudget) + " images: baseline " + fmt(base) +
              ", dp_full " + fmt(full) + " (need >= 2x baseline), dp_noise_0.02 " +
              fmt(lownoise) + " (need <= dp_full), clip-only " + fmt(cliponly) +
              " (need <= 1.5x baseline)"};
}

// ---------------------------------------------------------------------------
// Criterion 9: replaying a run from its manifest argv yields byte-identical
// CSV outputs. Exercised through the command-line binary with two output
// roots.
// ---------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const Ctx& ctx, const std::vector<std::string>& args, const fs::path& out_root,
            const fs::path& log_file) {
  std::string cmd = "SYNTHLEARN_OUT_ROOT='" + out_root.string() + "' '" + ctx.cli + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >>'" + log_file.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion9(Ctx& ctx) {
  if (ctx.cli.empty()) return {false, "needs --cli pointing at the command-line binary"};
  const fs::path rep = ctx.work / "replay";
  fs::remove_all(rep);
  const fs::path root_a = rep / "a";
  const fs::path root_b = rep / "b";
  fs::create_directories(root_a);
  fs::create_directories(root_b);
  const fs::path log = rep / "cli.log";

  // absolute input path so the recorded argv is replayable from any root
  const fs::path data = rep / "data32";
  ToyConfig tc;
  tc.count = 128;
  tc.resolution = 32;
  save_dataset(data.string(), toy_generate(tc, 909));

  struct Step {
    std::string label;
    std::vector<std::string> argv;
    std::string manifest;
    std::vector<std::string> csvs;
  };
  const std::vector<Step> steps = {
      {"toygen",
       {"toygen", "--out", "runs/toy", "--count", "60", "--resolution", "32", "--seed", "3"},
       "runs/toy/manifest.txt",
       {"runs/toy/dataset.csv"}},
      {"accountant",
       {"accountant", "--noise-grid", "0.1,0.2,0.4", "--q", "0.01", "--steps", "200",
        "--delta", "1e-5", "--out", "acc/sweep.csv"},
       "acc/sweep.csv.manifest",
       {"acc/sweep.csv"}},
      {"train-gan",
       {"train-gan", "--data", data.string(), "--out", "runs/gan", "--resolution", "32",
        "--batch", "8", "--budget", "96", "--interval", "96", "--log-interval", "32",
        "--seed", "5", "--gen-widths", "8,6,4,4", "--disc-widths", "4,4,6", "--latent-dim",
        "8"},
       "runs/gan/manifest.txt",
       {"runs/gan/train_log.csv"}},
  };

  std::size_t files_checked = 0;
  for (const auto& step : steps) {
    if (run_cli(ctx, step.argv, root_a, log) != 0)
      return {false, step.label + ": initial run failed (see " + log.string() + ")"};
    const RunManifest m = read_manifest((root_a / step.manifest).string());
    if (run_cli(ctx, m.argv, root_b, log) != 0)
      return {false, step.label + ": manifest replay failed (see " + log.string() + ")"};
    for (const auto& rel : step.csvs) {
      const std::string original = slurp(root_a / rel);
      if (original.empty()) return {false, step.label + ": empty output " + rel};
      if (original != slurp(root_b / rel))
        return {false, step.label + ": replay of " + rel + " is not byte-identical"};
      ++files_checked;
    }
  }
  return {true, "3 commands (toygen, accountant, train-gan) replayed from recorded argv, " +
                    std::to_string(files_checked) + " CSV outputs byte-identical"};
}

Outcome run_criterion(int n, Ctx& ctx) {
  switch (n) {
    case 1: return criterion1(ctx);
    case 2: return criterion2(ctx);
    case 3: return criterion3(ctx);
    case 4: return criterion4(ctx);
    case 5: return criterion5(ctx);
    case 6: return criterion6(ctx);
    case 7: return criterion7(ctx);
    case 8: return criterion8(ctx);
    case 9: return criterion9(ctx);
    default: return {false, "unknown criterion"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;
  std::string work = "acceptance_work";
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::cerr << "missing value for " << a << "\n";
        std::exit(2);
      }
      return argv[++i];
    };
    if (a == "--criterion")
      criterion = std::stoi(next());
    else if (a == "--work-dir")
      work = next();
    else if (a == "--cli")
      cli = next();
    else {
      std::cerr << "unknown flag " << a
                << " (expected --criterion N, --work-dir DIR, --cli PATH)\n";
      return 2;
    }
  }
  if (criterion < 0 || criterion > 9) {
    std::cerr << "--criterion must be 0 (all) or 1..9\n";
    return 2;
  }

  Ctx ctx{fs::absolute(work), cli};
  fs::create_directories(ctx.work);

  std::vector<int> wanted;
  if (criterion == 0)
    for (int n = 1; n <= 9; ++n) wanted.push_back(n);
  else
    wanted.push_back(criterion);

  bool all_pass = true;
  for (int n : wanted) {
    Outcome o;
    try {
      o = run_criterion(n, ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("unhandled error: ") + e.what()};
    }
    std::cout << "criterion " << n << (o.pass ? " PASS: " : " FAIL: ") << o.detail
              << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
