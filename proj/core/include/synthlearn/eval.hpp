#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthlearn/losses.hpp"
#include "synthlearn/model.hpp"
#include "synthlearn/pipeline.hpp"

namespace synthlearn {

// Inverse-frequency class weights: w_c = total / (2 * n_c), so a balanced
// dataset gets (1, 1).
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
};

ClassWeights class_weights(std::size_t n_negative, std::size_t n_positive);
ClassWeights class_weights(const ImageDataset& ds);

// Mann-Whitney AUC with average ranks: score ties between classes count one
// half. O(n log n).
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct ClassifierTrainConfig {
  std::size_t resolution = 224;  // model input side; normalization resizes to it
  std::vector<std::size_t> widths = {16, 32, 64};
  std::size_t epochs = 30;
  std::size_t batch = 32;
  AdamConfig opt{1e-3, 0.9, 0.999, 1e-8};
  bool augment_enabled = true;
  AugmentConfig augment;
  NormalizeSpec normalize;  // resolution field is overridden by `resolution`
  // Single-class training data is rejected unless weights are pinned here.
  std::optional<ClassWeights> weights_override;
};

struct EpochStats {
  std::size_t epoch = 0;    // 1-based
  double train_loss = 0.0;  // mean over minibatches
  double holdout_auc = 0.0; // NaN when no held-out set was supplied
};

struct ClassifierTrainResult {
  Model<float> model;              // final-epoch parameters
  std::vector<float> best_params;  // best held-out AUC epoch; final when no holdout
  std::size_t best_epoch = 0;      // 1-based; 0 when no holdout was supplied
  NormalizeSpec normalize;
  ClassWeights weights;
  std::vector<EpochStats> history;
};

// Weighted-BCE training of the abnormality classifier on a labeled dataset.
// Deterministic in (config, data, seed). The held-out set, when given, is
// scored after every epoch; test evaluation uses the final model and the
// best epoch is kept for diagnostics.
ClassifierTrainResult train_classifier(const ClassifierTrainConfig& cfg,
                                       const ImageDataset& train, std::uint64_t seed,
                                       const ImageDataset* holdout = nullptr);

// Abnormality probabilities for every image in the dataset.
std::vector<double> classifier_scores(const Model<float>& classifier, const ImageDataset& ds,
                                      const NormalizeSpec& norm, std::size_t batch = 64);

double evaluate_auc(const Model<float>& classifier, const ImageDataset& test,
                    const NormalizeSpec& norm);

// One row of the downstream experiment matrix: a classifier training set
// assembled from real data and/or freshly sampled synthetic images.
struct ExperimentArm {
  std::string name;
  bool use_real = true;
  std::string gan_variant;          // "" | "baseline" | "domain"
  std::size_t synth_per_class = 0;  // images sampled per class
};

// The nine standard rows: real only; real plus 500/1600/10000 synthetic from
// each GAN variant; synthetic-only 10000 from each variant.
std::vector<ExperimentArm> default_experiment_arms();

struct MatrixRow {
  std::string arm;
  std::uint64_t seed = 0;
  double auc = 0.0;
  std::size_t n_real = 0;
  std::size_t n_synth = 0;
  std::string gan_variant;
};

struct MatrixSummaryRow {
  std::string arm;
  double median_auc = 0.0;
};

struct MatrixResult {
  std::vector<MatrixRow> rows;        // one per arm x seed
  std::vector<MatrixSummaryRow> summary;  // per-arm median over seeds
};

// Trains one classifier per arm and seed on the assembled training set and
// scores each on the shared real test set. `variant_checkpoints` maps a
// gan_variant name to a generator checkpoint path.
MatrixResult run_matrix(const ClassifierTrainConfig& cfg, const std::vector<ExperimentArm>& arms,
                        const std::map<std::string, std::string>& variant_checkpoints,
                        const ImageDataset& real_train, const ImageDataset& test,
                        const std::vector<std::uint64_t>& seeds);

}  // namespace synthlearn
