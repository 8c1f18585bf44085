#pragma once

#include "synthlearn/ada.hpp"
#include "synthlearn/model.hpp"
#include "synthlearn/pipeline.hpp"

namespace synthlearn {

namespace detail {

// Probabilities are clamped away from {0, 1}; the gradient is zero where the
// clamp is active.
template <typename T>
constexpr T kProbFloor = static_cast<T>(1e-7);

template <typename T>
T clamped_bce(T prob, int target) {
  const T p = std::clamp(prob, kProbFloor<T>, T(1) - kProbFloor<T>);
  return target ? -std::log(p) : -std::log(T(1) - p);
}

template <typename T>
T clamped_bce_dprob(T prob, int target) {
  if (prob <= kProbFloor<T> || prob >= T(1) - kProbFloor<T>) return T(0);
  const T t = static_cast<T>(target);
  return (prob - t) / (prob * (T(1) - prob));
}

template <typename T>
T softplusT(T x) {
  return static_cast<T>(softplus(static_cast<double>(x)));
}

template <typename T>
T sigmoidT(T x) {
  return static_cast<T>(sigmoid(static_cast<double>(x)));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Discriminator loss over a combined batch: the first n_real logits belong to
// real images. loss = mean softplus(-real) + mean softplus(fake).
// ---------------------------------------------------------------------------
template <typename T>
class DiscriminatorLoss final : public OutputLoss<T> {
public:
  explicit DiscriminatorLoss(std::size_t n_real) : n_real_(n_real) {}
  std::string name() const override { return "discriminator_nonsaturating"; }

  T eval(const Tensor<T>& logits, Tensor<T>* grad) const override {
    const std::size_t n = logits.dim(0);
    if (n_real_ == 0 || n_real_ >= n)
      throw ContractError("discriminator loss: batch must hold real then fake logits");
    const std::size_t n_fake = n - n_real_;
    if (grad) *grad = Tensor<T>(logits.shape);
    T acc_real = T(0), acc_fake = T(0);
    for (std::size_t i = 0; i < n; ++i) {
      const T l = logits[i];
      if (i < n_real_) {
        acc_real += detail::softplusT(-l);
        if (grad) (*grad)[i] = -detail::sigmoidT(-l) / static_cast<T>(n_real_);
      } else {
        acc_fake += detail::softplusT(l);
        if (grad) (*grad)[i] = detail::sigmoidT(l) / static_cast<T>(n_fake);
      }
    }
    return acc_real / static_cast<T>(n_real_) + acc_fake / static_cast<T>(n_fake);
  }

private:
  std::size_t n_real_;
};

// ---------------------------------------------------------------------------
// Generator loss on a generated batch x: non-saturating adversarial term plus
// gamma times a domain-consistency term, the cross-entropy of a frozen
// abnormality classifier against the conditioning target. gamma == 0 runs the
// adversarial path only and consumes nothing else.
// ---------------------------------------------------------------------------
template <typename T>
class GeneratorLoss final : public OutputLoss<T> {
public:
  GeneratorLoss(const Model<T>& discriminator, std::vector<std::size_t> class_ids,
                std::vector<int> binary_targets, double gamma = 0.0,
                const Model<T>* domain_classifier = nullptr, NormalizeSpec normalize = {},
                const AdaApplication<T>* ada = nullptr)
      : disc_(&discriminator),
        class_ids_(std::move(class_ids)),
        targets_(std::move(binary_targets)),
        gamma_(gamma),
        domain_(domain_classifier),
        norm_(normalize),
        ada_(ada) {
    if (gamma_ < 0) throw ContractError("generator loss: gamma must be nonnegative");
    if (gamma_ > 0 && !domain_)
      throw ContractError("generator loss: positive gamma needs a domain classifier");
  }

  std::string name() const override {
    return gamma_ == 0 ? "generator_adversarial" : "generator_with_domain_term";
  }

  T eval(const Tensor<T>& images, Tensor<T>* grad) const override {
    const std::size_t m = images.dim(0);
    if (class_ids_.size() != m || targets_.size() != m)
      throw ContractError("generator loss: label count does not match batch");

    Tensor<T> augmented = ada_ ? ada_->forward(images) : images;
    Tensor<T> d_in = discriminator_input(augmented, class_ids_, disc_->spec.class_count);
    Trace<T> d_trace;
    Tensor<T> logits = disc_->forward(d_in, Mode::Eval, nullptr, grad ? &d_trace : nullptr);

    T loss = T(0);
    for (std::size_t i = 0; i < m; ++i) loss += detail::softplusT(-logits[i]);
    loss /= static_cast<T>(m);

    if (grad) {
      Tensor<T> dlogits(logits.shape);
      for (std::size_t i = 0; i < m; ++i)
        dlogits[i] = -detail::sigmoidT(-logits[i]) / static_cast<T>(m);
      Tensor<T> d_in_grad = disc_->net.backward(d_trace, dlogits, nullptr);
      Tensor<T> g = discriminator_input_image_grad(d_in_grad, disc_->spec.class_count);
      *grad = ada_ ? ada_->backward(g) : std::move(g);
    }

    if (gamma_ > 0) {
      Tensor<T> unit(images.shape);
      for (std::size_t k = 0; k < images.count(); ++k)
        unit[k] = images[k] * T(0.5) + T(0.5);
      Tensor<T> s_in = classifier_normalize(unit, norm_);
      Trace<T> s_trace;
      Tensor<T> probs = domain_->forward(s_in, Mode::Eval, nullptr, grad ? &s_trace : nullptr);

      T dom = T(0);
      for (std::size_t i = 0; i < m; ++i) dom += detail::clamped_bce(probs[i], targets_[i]);
      dom /= static_cast<T>(m);
      loss += static_cast<T>(gamma_) * dom;

      if (grad) {
        Tensor<T> dprobs(probs.shape);
        for (std::size_t i = 0; i < m; ++i)
          dprobs[i] = detail::clamped_bce_dprob(probs[i], targets_[i]) / static_cast<T>(m);
        Tensor<T> s_in_grad = domain_->net.backward(s_trace, dprobs, nullptr);
        Tensor<T> gu = classifier_normalize_backward(s_in_grad, norm_, images.dim(2),
                                                     images.dim(3));
        const T scale = static_cast<T>(gamma_) * T(0.5);
        for (std::size_t k = 0; k < grad->count(); ++k) (*grad)[k] += scale * gu[k];
      }
    }
    return loss;
  }

private:
  const Model<T>* disc_;
  std::vector<std::size_t> class_ids_;
  std::vector<int> targets_;
  double gamma_;
  const Model<T>* domain_;
  NormalizeSpec norm_;
  const AdaApplication<T>* ada_;
};

// ---------------------------------------------------------------------------
// Class-weighted binary cross-entropy over classifier probabilities.
// ---------------------------------------------------------------------------
template <typename T>
class WeightedBceLoss final : public OutputLoss<T> {
public:
  WeightedBceLoss(std::vector<int> labels, double weight_negative, double weight_positive)
      : labels_(std::move(labels)),
        w_{static_cast<T>(weight_negative), static_cast<T>(weight_positive)} {}

  std::string name() const override { return "weighted_bce"; }

  T eval(const Tensor<T>& probs, Tensor<T>* grad) const override {
    const std::size_t m = probs.dim(0);
    if (labels_.size() != m) throw ContractError("weighted bce: label count mismatch");
    if (grad) *grad = Tensor<T>(probs.shape);
    T acc = T(0);
    for (std::size_t i = 0; i < m; ++i) {
      const T w = w_[labels_[i] ? 1 : 0];
      acc += w * detail::clamped_bce(probs[i], labels_[i]);
      if (grad)
        (*grad)[i] = w * detail::clamped_bce_dprob(probs[i], labels_[i]) / static_cast<T>(m);
    }
    return acc / static_cast<T>(m);
  }

private:
  std::vector<int> labels_;
  T w_[2];
};

}  // namespace synthlearn
