#include "synthlearn/model.hpp"

namespace synthlearn {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Generator: return "generator";
    case ModelKind::Discriminator: return "discriminator";
    case ModelKind::Classifier: return "classifier";
  }
  throw ContractError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "generator") return ModelKind::Generator;
  if (s == "discriminator") return ModelKind::Discriminator;
  if (s == "classifier") return ModelKind::Classifier;
  throw ConfigError("unknown model kind: " + s);
}

namespace {

std::size_t log2_exact(std::size_t v) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < v) ++k;
  return k;
}

}  // namespace

std::size_t ArchitectureSpec::stage_count() const {
  const std::size_t k = log2_exact(resolution / 4);
  switch (kind) {
    case ModelKind::Generator: return k + 1;
    case ModelKind::Discriminator: return k;
    case ModelKind::Classifier: return 3;
  }
  throw ContractError("unknown model kind");
}

void ArchitectureSpec::validate() const {
  const bool pow2 = resolution != 0 && (resolution & (resolution - 1)) == 0;
  if (!pow2 || resolution < 32 || resolution > 256)
    throw ConfigError("resolution must be a power of two in [32, 256]");
  if (class_count < 1) throw ConfigError("class_count must be at least 1");
  if (kind == ModelKind::Generator) {
    if (latent_dim < 1) throw ConfigError("latent_dim must be at least 1");
    if (embed_dim < 1) throw ConfigError("embed_dim must be at least 1");
  }
  if (widths.size() != stage_count())
    throw ConfigError(to_string(kind) + " at resolution " + std::to_string(resolution) +
                      " needs " + std::to_string(stage_count()) + " widths, got " +
                      std::to_string(widths.size()));
  for (auto w : widths)
    if (w == 0) throw ConfigError("widths must be positive");
}

ArchitectureSpec default_generator_spec(std::size_t resolution, std::size_t class_count,
                                        std::size_t latent_dim) {
  ArchitectureSpec s;
  s.kind = ModelKind::Generator;
  s.resolution = resolution;
  s.latent_dim = latent_dim;
  s.class_count = class_count;
  s.embed_dim = 16;
  for (std::size_t i = 0; i < s.stage_count(); ++i)
    s.widths.push_back(std::max<std::size_t>(8, 64 >> i));
  return s;
}

ArchitectureSpec default_discriminator_spec(std::size_t resolution, std::size_t class_count) {
  ArchitectureSpec s;
  s.kind = ModelKind::Discriminator;
  s.resolution = resolution;
  s.class_count = class_count;
  for (std::size_t i = 0; i < s.stage_count(); ++i)
    s.widths.push_back(std::min<std::size_t>(64, 8 << i));
  return s;
}

ArchitectureSpec default_classifier_spec(std::size_t resolution) {
  ArchitectureSpec s;
  s.kind = ModelKind::Classifier;
  s.resolution = resolution;
  s.class_count = 2;
  s.widths = {16, 32, 64};
  return s;
}

}  // namespace synthlearn
