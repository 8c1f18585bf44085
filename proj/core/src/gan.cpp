#include "synthlearn/gan.hpp"

#include <cmath>
#include <filesystem>

#include "synthlearn/checkpoint.hpp"

namespace synthlearn {

namespace fs = std::filesystem;

namespace {

int binary_target(std::size_t class_id, std::size_t class_count) {
  return class_count == 2 ? static_cast<int>(class_id) : (class_id != 0 ? 1 : 0);
}

std::string checkpoint_name(std::uint64_t images_shown) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g_%09llu.ckpt",
                static_cast<unsigned long long>(images_shown));
  return buf;
}

// One discriminator update. Returns the loss and the mean sign of the real
// logits for the augmentation controller.
std::pair<double, double> discriminator_step(Model<float>& disc, const Tensor<float>& real,
                                             const std::vector<std::size_t>& real_classes,
                                             const Tensor<float>& fake,
                                             const std::vector<std::size_t>& fake_classes,
                                             const AdaApplication<float>* ada,
                                             const GanTrainConfig& cfg,
                                             AdamState<float>& opt, Rng& rng) {
  const std::size_t m = real.dim(0);
  const std::size_t r = real.dim(2);
  Tensor<float> combined({2 * m, 1, r, r});
  std::copy(real.ptr(), real.ptr() + real.count(), combined.ptr());
  std::copy(fake.ptr(), fake.ptr() + fake.count(), combined.ptr() + real.count());
  if (ada) combined = ada->forward(combined);
  std::vector<std::size_t> classes = real_classes;
  classes.insert(classes.end(), fake_classes.begin(), fake_classes.end());

  double loss = 0.0, sign_sum = 0.0;
  if (cfg.dp.enabled) {
    // per-instance gradients: one (real, fake) pair each, sum-reduced
    std::vector<std::vector<float>> micro;
    micro.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      Tensor<float> pair_img({2, 1, r, r});
      std::copy(combined.ptr() + i * r * r, combined.ptr() + (i + 1) * r * r, pair_img.ptr());
      std::copy(combined.ptr() + (m + i) * r * r, combined.ptr() + (m + i + 1) * r * r,
                pair_img.ptr() + r * r);
      Tensor<float> d_in = discriminator_input(
          pair_img, {classes[i], classes[m + i]}, disc.spec.class_count);
      Trace<float> trace;
      Tensor<float> logits = disc.forward(d_in, Mode::Train, nullptr, &trace);
      const float lr = logits[0], lf = logits[1];
      loss += softplus(-lr) + softplus(lf);
      sign_sum += lr > 0 ? 1.0 : (lr < 0 ? -1.0 : 0.0);
      Tensor<float> dlogits(logits.shape);
      dlogits[0] = static_cast<float>(-sigmoid(-lr));
      dlogits[1] = static_cast<float>(sigmoid(lf));
      std::vector<float> grads(disc.net.param_count(), 0.0f);
      disc.net.backward(trace, dlogits, &grads);
      micro.push_back(std::move(grads));
    }
    loss /= static_cast<double>(m);
    const std::vector<float> update = dp_transform(micro, cfg.dp, rng);
    adam_step(disc.net.params(), update, opt);
  } else {
    Tensor<float> d_in = discriminator_input(combined, classes, disc.spec.class_count);
    DiscriminatorLoss<float> dloss(m);
    Trace<float> trace;
    Tensor<float> logits = disc.forward(d_in, Mode::Train, nullptr, &trace);
    Tensor<float> dlogits;
    loss = dloss.eval(logits, &dlogits);
    for (std::size_t i = 0; i < m; ++i)
      sign_sum += logits[i] > 0 ? 1.0 : (logits[i] < 0 ? -1.0 : 0.0);
    std::vector<float> grads(disc.net.param_count(), 0.0f);
    disc.net.backward(trace, dlogits, &grads);
    adam_step(disc.net.params(), grads, opt);
  }
  return {loss, sign_sum / static_cast<double>(m)};
}

}  // namespace

GanTrainResult train_gan(const GanTrainConfig& cfg, const ImageDataset& data,
                         const Model<float>* domain_classifier, const std::string& out_dir,
                         std::uint64_t seed, const ProgressFn& progress) {
  ArchitectureSpec gs = default_generator_spec(cfg.resolution, cfg.class_count, cfg.latent_dim);
  if (!cfg.gen_widths.empty()) gs.widths = cfg.gen_widths;
  ArchitectureSpec ds = default_discriminator_spec(cfg.resolution, cfg.class_count);
  if (!cfg.disc_widths.empty()) ds.widths = cfg.disc_widths;
  return train_gan(cfg, data, domain_classifier, out_dir, seed, build_model<float>(gs, seed),
                   build_model<float>(ds, seed), progress);
}

GanTrainResult train_gan(const GanTrainConfig& cfg, const ImageDataset& data,
                         const Model<float>* domain_classifier, const std::string& out_dir,
                         std::uint64_t seed, Model<float> generator,
                         Model<float> discriminator, const ProgressFn& progress) {
  data.validate();
  if (data.size() == 0) throw ContractError("train_gan: empty dataset");
  if (data.resolution != cfg.resolution)
    throw ContractError("train_gan: dataset resolution does not match config");
  if (data.class_count != cfg.class_count)
    throw ContractError("train_gan: dataset class count does not match config");
  if (cfg.batch == 0) throw ConfigError("train_gan: batch must be positive");
  if (cfg.budget_images % cfg.batch != 0)
    throw ConfigError("train_gan: budget must be a multiple of the batch size");
  if (cfg.checkpoint_interval == 0)
    throw ConfigError("train_gan: checkpoint interval must be positive");
  if (cfg.gamma > 0 && !domain_classifier)
    throw ConfigError("train_gan: gamma > 0 needs a domain classifier");
  fs::create_directories(out_dir);

  GanTrainResult result;
  result.generator = std::move(generator);
  result.discriminator = std::move(discriminator);
  Model<float>& g = result.generator;
  Model<float>& d = result.discriminator;

  AdamState<float> opt_g(g.net.param_count(), cfg.opt_g);
  AdamState<float> opt_d(d.net.param_count(), cfg.opt_d);
  Rng rng(derive_seed(seed, "gan-train"));
  AdaState ada_state;

  const std::size_t m = cfg.batch;
  std::uint64_t next_checkpoint = cfg.checkpoint_interval;

  auto sample_classes = [&](std::size_t n) {
    std::vector<std::size_t> out(n);
    for (auto& c : out) c = data.class_ids[rng.uniform_int(data.size())];
    return out;
  };

  while (result.images_shown < cfg.budget_images) {
    // --- discriminator update ---
    std::vector<std::size_t> real_idx(m);
    for (auto& i : real_idx) i = rng.uniform_int(data.size());
    Tensor<float> real = batch_signed(data, real_idx);
    std::vector<std::size_t> real_classes(m);
    for (std::size_t i = 0; i < m; ++i) real_classes[i] = data.class_ids[real_idx[i]];

    std::vector<std::size_t> fake_classes = sample_classes(m);
    Tensor<float> z = sample_latents<float>(m, g.spec.latent_dim, rng);
    Tensor<float> fake =
        g.forward(generator_input(z, fake_classes, g.spec.class_count), Mode::Train);

    std::optional<AdaApplication<float>> d_ada;
    if (cfg.ada_enabled)
      d_ada.emplace(
          sample_ada_application<float>(cfg.ada, 2 * m, cfg.resolution, ada_state.p, rng));
    const auto [d_loss, real_sign] =
        discriminator_step(d, real, real_classes, fake, fake_classes,
                           d_ada ? &*d_ada : nullptr, cfg, opt_d, rng);
    if (!std::isfinite(d_loss))
      throw NumericError("train_gan: discriminator loss is not finite at " +
                         std::to_string(result.images_shown) + " images");
    if (cfg.ada_enabled) ada_update(ada_state, real_sign, m, cfg.ada);

    // --- generator update ---
    std::vector<std::size_t> gen_classes = sample_classes(m);
    std::vector<int> gen_targets(m);
    for (std::size_t i = 0; i < m; ++i)
      gen_targets[i] = binary_target(gen_classes[i], cfg.class_count);
    Tensor<float> zg = sample_latents<float>(m, g.spec.latent_dim, rng);
    std::optional<AdaApplication<float>> g_ada;
    if (cfg.ada_enabled)
      g_ada.emplace(sample_ada_application<float>(cfg.ada, m, cfg.resolution, ada_state.p, rng));
    GeneratorLoss<float> gloss(d, gen_classes, gen_targets, cfg.gamma,
                               cfg.gamma > 0 ? domain_classifier : nullptr, cfg.normalize,
                               g_ada ? &*g_ada : nullptr);
    LossAndGradients<float> gg =
        gradients(g.net, gloss, generator_input(zg, gen_classes, g.spec.class_count),
                  Mode::Train);
    if (!std::isfinite(gg.loss))
      throw NumericError("train_gan: generator loss is not finite at " +
                         std::to_string(result.images_shown) + " images");
    adam_step(g.net.params(), gg.param_grads, opt_g);

    result.images_shown += m;
    result.steps += 1;

    if (progress && cfg.log_interval > 0 &&
        (result.images_shown % cfg.log_interval < m || result.images_shown >= cfg.budget_images))
      progress({result.images_shown, d_loss, gg.loss, ada_state.p});

    while (next_checkpoint <= result.images_shown) {
      CheckpointMeta meta{static_cast<std::int64_t>(result.steps), next_checkpoint,
                          rng.serialize()};
      const std::string path = (fs::path(out_dir) / checkpoint_name(next_checkpoint)).string();
      save_checkpoint(path, g, meta);
      result.checkpoint_files.push_back(path);
      next_checkpoint += cfg.checkpoint_interval;
    }
  }

  CheckpointMeta meta{static_cast<std::int64_t>(result.steps), result.images_shown,
                      rng.serialize()};
  result.final_generator_file = (fs::path(out_dir) / "g_final.ckpt").string();
  result.final_discriminator_file = (fs::path(out_dir) / "d_final.ckpt").string();
  save_checkpoint(result.final_generator_file, g, meta);
  save_checkpoint(result.final_discriminator_file, d, meta);
  result.checkpoint_files.push_back(result.final_generator_file);
  result.checkpoint_files.push_back(result.final_discriminator_file);
  result.final_ada_p = ada_state.p;
  return result;
}

Tensor<float> generate_images(const Model<float>& generator,
                              const std::vector<std::size_t>& class_ids, Rng& rng,
                              std::size_t forward_batch) {
  if (generator.spec.kind != ModelKind::Generator)
    throw ContractError("generate_images: not a generator");
  if (forward_batch == 0) throw ContractError("generate_images: zero batch");
  const std::size_t n = class_ids.size();
  const std::size_t r = generator.spec.resolution;
  Tensor<float> out({n, 1, r, r});
  for (std::size_t start = 0; start < n; start += forward_batch) {
    const std::size_t m = std::min(forward_batch, n - start);
    std::vector<std::size_t> chunk_classes(class_ids.begin() + start,
                                           class_ids.begin() + start + m);
    Tensor<float> z = sample_latents<float>(m, generator.spec.latent_dim, rng);
    Tensor<float> imgs = generator.forward(
        generator_input(z, chunk_classes, generator.spec.class_count), Mode::Eval);
    for (std::size_t k = 0; k < imgs.count(); ++k)
      out[start * r * r + k] = imgs[k] * 0.5f + 0.5f;
  }
  return out;
}

}  // namespace synthlearn
