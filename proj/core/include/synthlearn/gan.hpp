#pragma once

#include <functional>
#include <string>

#include "synthlearn/ada.hpp"
#include "synthlearn/dp.hpp"
#include "synthlearn/losses.hpp"
#include "synthlearn/model.hpp"

namespace synthlearn {

struct GanTrainConfig {
  std::size_t resolution = 64;
  std::size_t class_count = 2;
  std::size_t batch = 16;
  std::uint64_t budget_images = 50000;  // real images shown to the discriminator
  std::uint64_t checkpoint_interval = 10000;
  double gamma = 0.0;  // weight of the domain-consistency generator term
  bool ada_enabled = true;
  AdaConfig ada;
  DpConfig dp;  // applied to discriminator updates
  AdamConfig opt_g{2e-4, 0.0, 0.99, 1e-8};
  AdamConfig opt_d{2e-4, 0.0, 0.99, 1e-8};
  NormalizeSpec normalize;  // domain classifier input spec
  // Optional explicit architectures; empty widths fall back to the defaults
  // for (resolution, class_count).
  std::vector<std::size_t> gen_widths;
  std::vector<std::size_t> disc_widths;
  std::size_t latent_dim = 64;
  std::uint64_t log_interval = 0;  // images between progress reports, 0 = off
};

struct GanProgress {
  std::uint64_t images_shown = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  double ada_p = 0.0;
};

struct GanTrainResult {
  Model<float> generator;
  Model<float> discriminator;
  std::uint64_t images_shown = 0;
  std::size_t steps = 0;
  double final_ada_p = 0.0;
  std::vector<std::string> checkpoint_files;  // interval files then finals
  std::string final_generator_file;
  std::string final_discriminator_file;
};

using ProgressFn = std::function<void(const GanProgress&)>;

// Alternating non-saturating GAN training with adaptive discriminator
// augmentation, an optional frozen domain classifier in the generator loss
// (gamma > 0), and an optional per-instance clip/noise transform on
// discriminator gradients. Writes g_<images>.ckpt at every interval crossing
// plus g_final.ckpt / d_final.ckpt, and throws NumericError if a loss stops
// being finite. Training state is a pure function of (config, data, domain
// classifier weights when gamma > 0, seed, initial models).
GanTrainResult train_gan(const GanTrainConfig& cfg, const ImageDataset& data,
                         const Model<float>* domain_classifier, const std::string& out_dir,
                         std::uint64_t seed, const ProgressFn& progress = {});

GanTrainResult train_gan(const GanTrainConfig& cfg, const ImageDataset& data,
                         const Model<float>* domain_classifier, const std::string& out_dir,
                         std::uint64_t seed, Model<float> generator,
                         Model<float> discriminator, const ProgressFn& progress = {});

// Samples latents from rng and returns generated images in unit range,
// shaped (n, 1, R, R).
Tensor<float> generate_images(const Model<float>& generator,
                              const std::vector<std::size_t>& class_ids, Rng& rng,
                              std::size_t forward_batch = 64);

}  // namespace synthlearn
