#include "synthlearn/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "synthlearn/checkpoint.hpp"
#include "synthlearn/gan.hpp"

namespace synthlearn {

namespace fs = std::filesystem;

MomentStats feature_moments(const Tensor<float>& features) {
  if (features.rank() != 2) throw ContractError("feature_moments: expected (N, D)");
  const std::size_t n = features.dim(0), d = features.dim(1);
  if (n < 2) throw ContractError("feature_moments: need at least 2 samples");
  MomentStats s;
  s.dim = d;
  s.mean.assign(d, 0.0);
  s.cov.assign(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += features[i * d + j];
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = features[i * d + j] - s.mean[j];
    for (std::size_t a = 0; a < d; ++a) {
      const double ca = centered[a];
      for (std::size_t b = a; b < d; ++b) s.cov[a * d + b] += ca * centered[b];
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      s.cov[a * d + b] *= inv;
      s.cov[b * d + a] = s.cov[a * d + b];
    }
  return s;
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& cov, std::size_t d) {
  Eigen::MatrixXd m(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) m(a, b) = cov[a * d + b];
  return m;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericError("fid: eigendecomposition failed");
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double fid_from_moments(const MomentStats& a, const MomentStats& b) {
  if (a.dim != b.dim || a.dim == 0) throw ContractError("fid: dimension mismatch");
  const std::size_t d = a.dim;
  double mean_term = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a.mean[j] - b.mean[j];
    mean_term += diff * diff;
  }
  const Eigen::MatrixXd ca = to_matrix(a.cov, d);
  const Eigen::MatrixXd cb = to_matrix(b.cov, d);
  const Eigen::MatrixXd ra = psd_sqrt(ca);
  Eigen::MatrixXd inner = ra * cb * ra;
  inner = 0.5 * (inner + inner.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner);
  if (es.info() != Eigen::Success) throw NumericError("fid: eigendecomposition failed");
  const double tr_sqrt = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return mean_term + ca.trace() + cb.trace() - 2.0 * tr_sqrt;
}

double fid(const Tensor<float>& features_a, const Tensor<float>& features_b) {
  return fid_from_moments(feature_moments(features_a), feature_moments(features_b));
}

namespace {

double sq_dist(const float* a, const float* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    acc += diff * diff;
  }
  return acc;
}

// squared distance to the k-th nearest other point, per point
std::vector<double> knn_sq_radii(const Tensor<float>& feats, std::size_t k) {
  const std::size_t n = feats.dim(0), d = feats.dim(1);
  if (n <= k) throw ContractError("knn radii: need more than k points");
  std::vector<double> radii(n);
  std::vector<double> dists(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t w = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dists[w++] = sq_dist(feats.ptr() + i * d, feats.ptr() + j * d, d);
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    radii[i] = dists[k - 1];
  }
  return radii;
}

double covered_fraction(const Tensor<float>& queries, const Tensor<float>& support,
                        const std::vector<double>& support_sq_radii) {
  const std::size_t nq = queries.dim(0), d = queries.dim(1);
  const std::size_t ns = support.dim(0);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < ns; ++j) {
      if (sq_dist(queries.ptr() + i * d, support.ptr() + j * d, d) <= support_sq_radii[j]) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / static_cast<double>(nq);
}

}  // namespace

PrecisionRecall knn_precision_recall(const Tensor<float>& real_features,
                                     const Tensor<float>& gen_features, std::size_t k) {
  if (real_features.dim(1) != gen_features.dim(1))
    throw ContractError("precision/recall: feature dimensions differ");
  if (k == 0) throw ContractError("precision/recall: k must be positive");
  const auto real_radii = knn_sq_radii(real_features, k);
  const auto gen_radii = knn_sq_radii(gen_features, k);
  PrecisionRecall pr;
  pr.precision = covered_fraction(gen_features, real_features, real_radii);
  pr.recall = covered_fraction(real_features, gen_features, gen_radii);
  return pr;
}

Tensor<float> extract_features(const Model<float>& classifier, const Tensor<float>& unit_images,
                               const NormalizeSpec& norm, std::size_t batch) {
  if (batch == 0) throw ContractError("extract_features: zero batch");
  const std::size_t n = unit_images.dim(0);
  const std::size_t d = classifier.spec.widths.back();
  Tensor<float> out({n, d});
  for (std::size_t start = 0; start < n; start += batch) {
    const std::size_t m = std::min(batch, n - start);
    Tensor<float> chunk({m, 1, unit_images.dim(2), unit_images.dim(3)});
    std::copy(unit_images.ptr() + start * unit_images.dim(2) * unit_images.dim(3),
              unit_images.ptr() + (start + m) * unit_images.dim(2) * unit_images.dim(3),
              chunk.ptr());
    Tensor<float> feats = classifier_features(classifier, classifier_normalize(chunk, norm));
    std::copy(feats.ptr(), feats.ptr() + m * d, out.ptr() + start * d);
  }
  return out;
}

std::vector<CheckpointEval> evaluate_checkpoints(const std::string& checkpoint_dir,
                                                 const ImageDataset& real,
                                                 const Model<float>& extractor,
                                                 const NormalizeSpec& norm,
                                                 std::size_t sample_count, std::uint64_t seed,
                                                 std::size_t knn_k) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(checkpoint_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("g_", 0) == 0 && name.size() > 5 &&
        name.compare(name.size() - 5, 5, ".ckpt") == 0)
      files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw ConfigError("no generator checkpoints under " + checkpoint_dir);

  // fixed real reference: subsample without replacement when needed
  Rng rng(derive_seed(seed, "checkpoint-eval"));
  std::vector<std::size_t> real_idx(real.size());
  for (std::size_t i = 0; i < real_idx.size(); ++i) real_idx[i] = i;
  if (sample_count < real.size()) {
    for (std::size_t i = 0; i < sample_count; ++i) {
      const std::size_t j = i + rng.uniform_int(real_idx.size() - i);
      std::swap(real_idx[i], real_idx[j]);
    }
    real_idx.resize(sample_count);
  }
  Tensor<float> real_feats =
      extract_features(extractor, batch_unit(real, real_idx), norm);

  // class ids for generation follow the real label distribution
  std::vector<std::size_t> gen_classes(sample_count);
  for (std::size_t i = 0; i < sample_count; ++i)
    gen_classes[i] = real.class_ids[rng.uniform_int(real.size())];

  std::vector<CheckpointEval> evals;
  std::set<std::uint64_t> seen_budgets;
  for (const auto& file : files) {
    LoadedCheckpoint ck = load_checkpoint(file);
    // the final checkpoint aliases the last interval one; evaluate each
    // training budget once
    if (!seen_budgets.insert(ck.meta.images_shown).second) continue;
    const std::string stem = fs::path(file).filename().string();
    Rng gen_rng(derive_seed(seed, "checkpoint-eval/" + stem));
    Tensor<float> images = generate_images(ck.model, gen_classes, gen_rng);
    Tensor<float> gen_feats = extract_features(extractor, images, norm);
    CheckpointEval e;
    e.file = stem;
    e.images_shown = ck.meta.images_shown;
    e.fid = fid(real_feats, gen_feats);
    const PrecisionRecall pr = knn_precision_recall(real_feats, gen_feats, knn_k);
    e.precision = pr.precision;
    e.recall = pr.recall;
    evals.push_back(std::move(e));
  }
  std::sort(evals.begin(), evals.end(), [](const CheckpointEval& a, const CheckpointEval& b) {
    return a.images_shown < b.images_shown;
  });
  return evals;
}

}  // namespace synthlearn
