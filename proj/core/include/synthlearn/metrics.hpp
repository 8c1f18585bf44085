#pragma once

#include <string>
#include <vector>

#include "synthlearn/model.hpp"
#include "synthlearn/pipeline.hpp"

namespace synthlearn {

// First and second moments of a feature matrix (rows = samples). Covariance
// is the unbiased (n-1) estimator, stored dense row-major.
struct MomentStats {
  std::size_t dim = 0;
  std::vector<double> mean;
  std::vector<double> cov;
};

MomentStats feature_moments(const Tensor<float>& features);

// Frechet distance between Gaussians fitted to two feature sets:
// |mu_a - mu_b|^2 + Tr(cov_a) + Tr(cov_b) - 2 Tr((cov_a cov_b)^(1/2)).
// The matrix square roots run through a symmetric eigendecomposition with
// negative eigenvalues clamped to zero.
double fid_from_moments(const MomentStats& a, const MomentStats& b);
double fid(const Tensor<float>& features_a, const Tensor<float>& features_b);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Manifold precision/recall with k-th nearest neighbour radii (Euclidean,
// self excluded). A generated point counts as precise when it lies within any
// real point's radius; recall mirrors it with the roles swapped. Boundary
// hits (distance equal to the radius) count as inside.
PrecisionRecall knn_precision_recall(const Tensor<float>& real_features,
                                     const Tensor<float>& gen_features, std::size_t k = 3);

// Pooled penultimate activations of the abnormality classifier over unit
// images, computed in batches.
Tensor<float> extract_features(const Model<float>& classifier, const Tensor<float>& unit_images,
                               const NormalizeSpec& norm, std::size_t batch = 64);

struct CheckpointEval {
  std::string file;
  std::uint64_t images_shown = 0;
  double fid = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// Scores every generator checkpoint in a directory against a real dataset:
// sample_count images are generated per checkpoint with class ids drawn from
// the real label distribution, and compared in the extractor's feature space.
std::vector<CheckpointEval> evaluate_checkpoints(const std::string& checkpoint_dir,
                                                 const ImageDataset& real,
                                                 const Model<float>& extractor,
                                                 const NormalizeSpec& norm,
                                                 std::size_t sample_count, std::uint64_t seed,
                                                 std::size_t knn_k = 3);

}  // namespace synthlearn
