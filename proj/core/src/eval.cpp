#include "synthlearn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "synthlearn/checkpoint.hpp"
#include "synthlearn/gan.hpp"

namespace synthlearn {

ClassWeights class_weights(std::size_t n_negative, std::size_t n_positive) {
  if (n_negative == 0 || n_positive == 0)
    throw ConfigError("class_weights: both classes must be present");
  const double total = static_cast<double>(n_negative + n_positive);
  return {total / (2.0 * static_cast<double>(n_negative)),
          total / (2.0 * static_cast<double>(n_positive))};
}

ClassWeights class_weights(const ImageDataset& ds) {
  std::size_t pos = 0;
  for (int l : ds.labels) pos += l ? 1 : 0;
  return class_weights(ds.labels.size() - pos, pos);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ContractError("roc_auc: scores and labels must align");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += l ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ContractError("roc_auc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based average rank of the tie run [i, j)
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    i = j;
  }
  const double u = rank_sum_pos - static_cast<double>(n_pos) *
                                      (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

ClassifierTrainResult train_classifier(const ClassifierTrainConfig& cfg,
                                       const ImageDataset& train, std::uint64_t seed,
                                       const ImageDataset* holdout) {
  train.validate();
  if (train.size() == 0) throw ContractError("train_classifier: empty dataset");
  if (cfg.batch == 0 || cfg.epochs == 0)
    throw ConfigError("train_classifier: batch and epochs must be positive");

  ClassifierTrainResult result;
  ArchitectureSpec spec = default_classifier_spec(cfg.resolution);
  spec.widths = cfg.widths;
  result.model = build_model<float>(spec, seed);
  result.normalize = cfg.normalize;
  result.normalize.resolution = cfg.resolution;
  result.weights = cfg.weights_override ? *cfg.weights_override : class_weights(train);

  AdamState<float> opt(result.model.net.param_count(), cfg.opt);
  Rng rng(derive_seed(seed, "classifier-train"));

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  double best_auc = -1.0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t m = std::min(cfg.batch, order.size() - start);
      Tensor<float> unit({m, 1, train.resolution, train.resolution});
      std::vector<int> labels(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t idx = order[start + i];
        labels[i] = train.labels[idx];
        if (cfg.augment_enabled) {
          GrayImage aug = classifier_augment(train.images[idx], cfg.augment, rng);
          std::copy(aug.values.begin(), aug.values.end(),
                    unit.ptr() + i * train.resolution * train.resolution);
        } else {
          std::copy(train.images[idx].values.begin(), train.images[idx].values.end(),
                    unit.ptr() + i * train.resolution * train.resolution);
        }
      }
      Tensor<float> input = classifier_normalize(unit, result.normalize);
      WeightedBceLoss<float> loss(labels, result.weights.negative, result.weights.positive);
      LossAndGradients<float> lg =
          gradients(result.model.net, loss, input, Mode::Train, &rng);
      if (!std::isfinite(lg.loss))
        throw NumericError("train_classifier: loss is not finite in epoch " +
                           std::to_string(epoch));
      adam_step(result.model.net.params(), lg.param_grads, opt);
      epoch_loss += lg.loss;
      ++batches;
    }

    EpochStats stats;
    stats.epoch = epoch + 1;
    stats.train_loss = epoch_loss / static_cast<double>(batches);
    stats.holdout_auc = std::numeric_limits<double>::quiet_NaN();
    if (holdout) {
      stats.holdout_auc = evaluate_auc(result.model, *holdout, result.normalize);
      if (stats.holdout_auc > best_auc) {
        best_auc = stats.holdout_auc;
        result.best_params = result.model.net.params();
        result.best_epoch = stats.epoch;
      }
    }
    result.history.push_back(stats);
  }
  if (!holdout) {
    result.best_params = result.model.net.params();
    result.best_epoch = 0;
  }
  return result;
}

std::vector<double> classifier_scores(const Model<float>& classifier, const ImageDataset& ds,
                                      const NormalizeSpec& norm, std::size_t batch) {
  ds.validate();
  if (batch == 0) throw ContractError("classifier_scores: zero batch");
  std::vector<double> scores(ds.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += batch) {
    const std::size_t m = std::min(batch, ds.size() - start);
    idx.resize(m);
    std::iota(idx.begin(), idx.end(), start);
    Tensor<float> input = classifier_normalize(batch_unit(ds, idx), norm);
    Tensor<float> probs = classifier.forward(input, Mode::Eval);
    for (std::size_t i = 0; i < m; ++i) scores[start + i] = probs[i];
  }
  return scores;
}

double evaluate_auc(const Model<float>& classifier, const ImageDataset& test,
                    const NormalizeSpec& norm) {
  return roc_auc(classifier_scores(classifier, test, norm), test.labels);
}

std::vector<ExperimentArm> default_experiment_arms() {
  std::vector<ExperimentArm> arms;
  arms.push_back({"real", true, "", 0});
  for (std::size_t per_class : {std::size_t(250), std::size_t(800), std::size_t(5000)})
    for (const char* variant : {"baseline", "domain"}) {
      ExperimentArm arm;
      arm.name = "real_" + std::string(variant) + "_" + std::to_string(2 * per_class);
      arm.use_real = true;
      arm.gan_variant = variant;
      arm.synth_per_class = per_class;
      arms.push_back(arm);
    }
  for (const char* variant : {"baseline", "domain"}) {
    ExperimentArm arm;
    arm.name = "synth_" + std::string(variant) + "_10000";
    arm.use_real = false;
    arm.gan_variant = variant;
    arm.synth_per_class = 5000;
    arms.push_back(arm);
  }
  return arms;
}

namespace {

// Appends freshly sampled synthetic images (balanced across classes) to ds.
void append_synthetic(ImageDataset& ds, const Model<float>& generator,
                      std::size_t per_class, Rng& rng) {
  const std::size_t class_count = generator.spec.class_count;
  std::vector<std::size_t> class_ids;
  class_ids.reserve(per_class * class_count);
  for (std::size_t c = 0; c < class_count; ++c)
    class_ids.insert(class_ids.end(), per_class, c);
  Tensor<float> images = generate_images(generator, class_ids, rng);
  if (generator.spec.resolution != ds.resolution)
    images = bilinear_resize(images, ds.resolution, ds.resolution);
  const std::size_t res = ds.resolution;
  for (std::size_t i = 0; i < class_ids.size(); ++i) {
    GrayImage img(res, res, ValueRange::Unit);
    std::copy(images.ptr() + i * res * res, images.ptr() + (i + 1) * res * res,
              img.values.begin());
    img.clamp_to_range();
    ds.push(std::move(img), class_ids[i], class_ids[i] != 0 ? 1 : 0);
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

MatrixResult run_matrix(const ClassifierTrainConfig& cfg, const std::vector<ExperimentArm>& arms,
                        const std::map<std::string, std::string>& variant_checkpoints,
                        const ImageDataset& real_train, const ImageDataset& test,
                        const std::vector<std::uint64_t>& seeds) {
  if (arms.empty()) throw ContractError("run_matrix: no arms");
  if (seeds.empty()) throw ContractError("run_matrix: no seeds");
  real_train.validate();
  test.validate();

  std::map<std::string, LoadedCheckpoint> generators;
  for (const auto& arm : arms) {
    if (!arm.use_real && arm.synth_per_class == 0)
      throw ConfigError("arm " + arm.name + ": no data source active");
    if (arm.synth_per_class == 0) continue;
    if (generators.count(arm.gan_variant)) continue;
    auto it = variant_checkpoints.find(arm.gan_variant);
    if (it == variant_checkpoints.end())
      throw ConfigError("arm " + arm.name + ": no checkpoint registered for variant '" +
                        arm.gan_variant + "'");
    LoadedCheckpoint ck = load_checkpoint(it->second);
    if (ck.model.spec.kind != ModelKind::Generator)
      throw ConfigError("variant '" + arm.gan_variant + "': " + it->second +
                        " is not a generator checkpoint");
    generators.emplace(arm.gan_variant, std::move(ck));
  }

  MatrixResult result;
  for (const auto& arm : arms) {
    std::vector<double> arm_aucs;
    for (std::uint64_t seed : seeds) {
      ImageDataset train;
      train.resolution = real_train.resolution;
      train.class_count = real_train.class_count;
      if (arm.use_real) train = real_train;
      if (arm.synth_per_class > 0) {
        Rng rng(derive_seed(seed, "matrix-synth/" + arm.name));
        append_synthetic(train, generators.at(arm.gan_variant).model, arm.synth_per_class, rng);
      }
      ClassifierTrainResult r =
          train_classifier(cfg, train, derive_seed(seed, "matrix/" + arm.name));
      MatrixRow row;
      row.arm = arm.name;
      row.seed = seed;
      row.auc = evaluate_auc(r.model, test, r.normalize);
      row.n_real = arm.use_real ? real_train.size() : 0;
      row.n_synth = train.size() - row.n_real;
      row.gan_variant = arm.gan_variant;
      result.rows.push_back(row);
      arm_aucs.push_back(row.auc);
    }
    result.summary.push_back({arm.name, median(arm_aucs)});
  }
  return result;
}

}  // namespace synthlearn
