#pragma once

#include <string>
#include <vector>

#include "synthlearn/network.hpp"

namespace synthlearn {

enum class ModelKind { Generator, Discriminator, Classifier };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Resolution must be a power of two in [32, 256]. Width lists are per
// resolution stage: the generator runs log2(res/4)+1 stages starting at 4x4,
// the discriminator log2(res/4) pooling stages, the classifier exactly 3.
struct ArchitectureSpec {
  ModelKind kind = ModelKind::Generator;
  std::size_t resolution = 64;
  std::size_t latent_dim = 64;
  std::size_t class_count = 2;
  std::size_t embed_dim = 16;
  std::vector<std::size_t> widths;

  void validate() const;
  std::size_t stage_count() const;
};

ArchitectureSpec default_generator_spec(std::size_t resolution, std::size_t class_count,
                                        std::size_t latent_dim = 64);
ArchitectureSpec default_discriminator_spec(std::size_t resolution, std::size_t class_count);
ArchitectureSpec default_classifier_spec(std::size_t resolution);

template <typename T>
struct Model {
  ArchitectureSpec spec;
  Network<T> net;
  // classifier only: index of the head dense layer; its cached input is the
  // pooled feature vector
  std::size_t head_layer = 0;

  std::vector<std::size_t> input_shape(std::size_t batch) const {
    switch (spec.kind) {
      case ModelKind::Generator:
        return {batch, spec.latent_dim + spec.class_count};
      case ModelKind::Discriminator:
        return {batch, 1 + spec.class_count, spec.resolution, spec.resolution};
      case ModelKind::Classifier:
        return {batch, 3, spec.resolution, spec.resolution};
    }
    throw ContractError("unknown model kind");
  }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng* rng = nullptr,
                    Trace<T>* trace = nullptr) const {
    require_shape(input, input_shape(input.dim(0)), to_string(spec.kind) + " input");
    return net.forward(input, mode, rng, trace);
  }
};

namespace detail {

template <typename T>
void append_layers(Network<T>& net, const ArchitectureSpec& spec) {
  spec.validate();
  const std::size_t stages = spec.stage_count();
  switch (spec.kind) {
    case ModelKind::Generator: {
      net.add(std::make_unique<ClassEmbedLayer<T>>("embed", spec.latent_dim, spec.class_count,
                                                   spec.embed_dim));
      net.add(std::make_unique<DenseLayer<T>>("seed_fc", spec.latent_dim + spec.embed_dim,
                                              spec.widths[0] * 16));
      net.add(std::make_unique<LeakyReluLayer<T>>("seed_act"));
      net.add(std::make_unique<ReshapeLayer<T>>(
          "seed_reshape", std::vector<std::size_t>{spec.widths[0], 4, 4}));
      for (std::size_t s = 1; s < stages; ++s) {
        const std::string tag = std::to_string(s);
        net.add(std::make_unique<Upsample2Layer<T>>("up" + tag));
        net.add(std::make_unique<Conv3x3Layer<T>>("conv" + tag, spec.widths[s - 1],
                                                  spec.widths[s]));
        net.add(std::make_unique<LeakyReluLayer<T>>("act" + tag));
      }
      net.add(std::make_unique<Conv3x3Layer<T>>("to_image", spec.widths[stages - 1], 1));
      net.add(std::make_unique<TanhLayer<T>>("image_act"));
      break;
    }
    case ModelKind::Discriminator: {
      std::size_t prev = 1 + spec.class_count;
      for (std::size_t s = 0; s < stages; ++s) {
        const std::string tag = std::to_string(s + 1);
        net.add(std::make_unique<Conv3x3Layer<T>>("conv" + tag, prev, spec.widths[s]));
        net.add(std::make_unique<LeakyReluLayer<T>>("act" + tag));
        net.add(std::make_unique<AvgPool2Layer<T>>("pool" + tag));
        prev = spec.widths[s];
      }
      net.add(std::make_unique<ReshapeLayer<T>>("flatten",
                                                std::vector<std::size_t>{prev * 16}));
      net.add(std::make_unique<DenseLayer<T>>("fc", prev * 16, 1));
      break;
    }
    case ModelKind::Classifier: {
      std::size_t prev = 3;
      for (std::size_t s = 0; s < 3; ++s) {
        const std::string tag = std::to_string(s + 1);
        net.add(std::make_unique<Conv3x3Layer<T>>("conv" + tag, prev, spec.widths[s]));
        net.add(std::make_unique<LeakyReluLayer<T>>("act" + tag));
        net.add(std::make_unique<AvgPool2Layer<T>>("pool" + tag));
        prev = spec.widths[s];
      }
      net.add(std::make_unique<GlobalAvgPoolLayer<T>>("gap"));
      net.add(std::make_unique<DenseLayer<T>>("fc", prev, 1));
      net.add(std::make_unique<DropoutLayer<T>>("drop", 0.1));
      net.add(std::make_unique<SigmoidLayer<T>>("prob"));
      break;
    }
  }
}

}  // namespace detail

template <typename T>
Model<T> build_model(const ArchitectureSpec& spec, std::uint64_t seed) {
  Model<T> m;
  m.spec = spec;
  detail::append_layers(m.net, spec);
  Rng rng(derive_seed(seed, "init/" + to_string(spec.kind)));
  m.net.init_params(rng);
  if (spec.kind == ModelKind::Classifier) m.head_layer = m.net.layer_count() - 3;
  // shape-check the whole stack once at build time
  m.net.output_shape(m.input_shape(1));
  return m;
}

// ---------------------------------------------------------------------------
// Batch input builders
// ---------------------------------------------------------------------------

// (N, latent + classes): sampled latent then one-hot class.
template <typename T>
Tensor<T> generator_input(const Tensor<T>& latents, const std::vector<std::size_t>& class_ids,
                          std::size_t class_count) {
  const std::size_t n = latents.dim(0), l = latents.dim(1);
  if (class_ids.size() != n) throw ContractError("generator_input: batch size mismatch");
  Tensor<T> out({n, l + class_count});
  for (std::size_t i = 0; i < n; ++i) {
    if (class_ids[i] >= class_count) throw ContractError("generator_input: class id range");
    T* row = out.ptr() + i * (l + class_count);
    std::copy(latents.ptr() + i * l, latents.ptr() + (i + 1) * l, row);
    row[l + class_ids[i]] = T(1);
  }
  return out;
}

template <typename T>
Tensor<T> sample_latents(std::size_t n, std::size_t latent_dim, Rng& rng) {
  Tensor<T> z({n, latent_dim});
  for (std::size_t i = 0; i < z.count(); ++i) z[i] = static_cast<T>(rng.normal());
  return z;
}

// (N, 1 + classes, R, R): image channel then constant one-hot planes.
template <typename T>
Tensor<T> discriminator_input(const Tensor<T>& images, const std::vector<std::size_t>& class_ids,
                              std::size_t class_count) {
  const std::size_t n = images.dim(0), h = images.dim(2), w = images.dim(3);
  if (images.dim(1) != 1) throw ContractError("discriminator_input: expected 1-channel images");
  if (class_ids.size() != n) throw ContractError("discriminator_input: batch size mismatch");
  Tensor<T> out({n, 1 + class_count, h, w});
  for (std::size_t i = 0; i < n; ++i) {
    if (class_ids[i] >= class_count) throw ContractError("discriminator_input: class id range");
    std::copy(images.ptr() + i * h * w, images.ptr() + (i + 1) * h * w,
              out.ptr() + i * (1 + class_count) * h * w);
    T* plane = out.ptr() + (i * (1 + class_count) + 1 + class_ids[i]) * h * w;
    std::fill(plane, plane + h * w, T(1));
  }
  return out;
}

// Slices d(loss)/d(disc input) back to the image channel.
template <typename T>
Tensor<T> discriminator_input_image_grad(const Tensor<T>& grad_in, std::size_t class_count) {
  const std::size_t n = grad_in.dim(0), h = grad_in.dim(2), w = grad_in.dim(3);
  if (grad_in.dim(1) != 1 + class_count)
    throw ContractError("image_grad: channel count mismatch");
  Tensor<T> out({n, 1, h, w});
  for (std::size_t i = 0; i < n; ++i)
    std::copy(grad_in.ptr() + i * (1 + class_count) * h * w,
              grad_in.ptr() + i * (1 + class_count) * h * w + h * w, out.ptr() + i * h * w);
  return out;
}

// Pooled penultimate features of a classifier batch, shape (N, widths.back()).
template <typename T>
Tensor<T> classifier_features(const Model<T>& model, const Tensor<T>& input) {
  if (model.spec.kind != ModelKind::Classifier)
    throw ContractError("classifier_features: not a classifier");
  Trace<T> trace;
  model.forward(input, Mode::Eval, nullptr, &trace);
  return trace.caches[model.head_layer].input;
}

}  // namespace synthlearn
