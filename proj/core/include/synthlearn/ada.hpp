#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "synthlearn/common.hpp"
#include "synthlearn/tensor.hpp"

namespace synthlearn {

// Adaptive discriminator augmentation. Each category fires independently with
// the shared probability p per image; the whole sampled transform is linear in
// the pixels (noise is a sampled constant), so backward is the exact
// transpose. Images are in signed range, with 0 as the neutral fill value.
struct AdaConfig {
  double target = 0.6;               // sign-of-real-logit overfitting target
  std::size_t adjust_interval = 4;   // minibatches between probability updates
  std::size_t ramp_images = 500000;  // images over which p can move by 1.0
  double p_max = 0.85;

  double max_translate = 0.125;  // fraction of resolution, integer pixels
  double max_rotate_deg = 10.0;
  double scale_min = 0.8;
  double scale_max = 1.25;
  double contrast_min = 0.75;
  double contrast_max = 1.25;
  double max_brightness = 0.2;
  double noise_std = 0.05;
  double cutout_frac = 0.25;
};

enum class AdaCategory { Blit = 0, Geom, Color, Noise, Cutout };
constexpr std::size_t kAdaCategoryCount = 5;

// One image's sampled transform.
struct AdaImagePlan {
  bool flip = false;
  long shift_y = 0, shift_x = 0;
  bool has_geom = false;
  double rotate_rad = 0.0, scale = 1.0;
  bool has_color = false;
  double contrast = 1.0, brightness = 0.0;
  bool has_noise = false;
  std::size_t noise_offset = 0;  // into the shared noise buffer
  bool has_cutout = false;
  std::size_t cut_y = 0, cut_x = 0, cut_side = 0;
};

template <typename T>
class AdaApplication {
public:
  AdaApplication(std::size_t resolution, std::vector<AdaImagePlan> plans,
                 std::vector<T> noise)
      : res_(resolution), plans_(std::move(plans)), noise_(std::move(noise)) {}

  std::size_t batch() const { return plans_.size(); }
  const std::vector<AdaImagePlan>& plans() const { return plans_; }

  std::size_t fire_count(AdaCategory cat) const {
    std::size_t n = 0;
    for (const auto& p : plans_) {
      switch (cat) {
        case AdaCategory::Blit: n += (p.flip || p.shift_y || p.shift_x) ? 1 : 0; break;
        case AdaCategory::Geom: n += p.has_geom ? 1 : 0; break;
        case AdaCategory::Color: n += p.has_color ? 1 : 0; break;
        case AdaCategory::Noise: n += p.has_noise ? 1 : 0; break;
        case AdaCategory::Cutout: n += p.has_cutout ? 1 : 0; break;
      }
    }
    return n;
  }

  Tensor<T> forward(const Tensor<T>& images) const {
    check(images);
    Tensor<T> out = images;
    for (std::size_t i = 0; i < plans_.size(); ++i) apply_one(out, i);
    for (std::size_t k = 0; k < out.count(); ++k) out[k] = std::clamp(out[k], T(-1), T(1));
    return out;
  }

  // Transpose of forward, ignoring the output clamp (treated as identity in
  // the interior; training keeps generator outputs inside the open range).
  Tensor<T> backward(const Tensor<T>& grad_out) const {
    check(grad_out);
    Tensor<T> g = grad_out;
    for (std::size_t i = 0; i < plans_.size(); ++i) unapply_one(g, i);
    return g;
  }

private:
  void check(const Tensor<T>& t) const {
    if (t.rank() != 4 || t.dim(0) != plans_.size() || t.dim(1) != 1 || t.dim(2) != res_ ||
        t.dim(3) != res_)
      throw ContractError("ada: batch shape mismatch");
  }

  T* plane(Tensor<T>& t, std::size_t i) const { return t.ptr() + i * res_ * res_; }

  void apply_one(Tensor<T>& t, std::size_t i) const {
    const AdaImagePlan& p = plans_[i];
    T* img = plane(t, i);
    if (p.flip) flip(img);
    if (p.shift_y || p.shift_x) shift(img, p.shift_y, p.shift_x);
    if (p.has_geom) warp(img, p.rotate_rad, p.scale);
    if (p.has_color) {
      const T c = static_cast<T>(p.contrast), b = static_cast<T>(p.brightness);
      for (std::size_t k = 0; k < res_ * res_; ++k) img[k] = img[k] * c + b;
    }
    if (p.has_noise) {
      const T* n = noise_.data() + p.noise_offset;
      for (std::size_t k = 0; k < res_ * res_; ++k) img[k] += n[k];
    }
    if (p.has_cutout) cutout(img, p, T(0));
  }

  void unapply_one(Tensor<T>& g, std::size_t i) const {
    const AdaImagePlan& p = plans_[i];
    T* img = plane(g, i);
    if (p.has_cutout) cutout(img, p, T(0));
    if (p.has_color) {
      const T c = static_cast<T>(p.contrast);
      for (std::size_t k = 0; k < res_ * res_; ++k) img[k] *= c;
    }
    if (p.has_geom) warp_transpose(img, p.rotate_rad, p.scale);
    if (p.shift_y || p.shift_x) shift(img, -p.shift_y, -p.shift_x);
    if (p.flip) flip(img);
  }

  void flip(T* img) const {
    for (std::size_t y = 0; y < res_; ++y) {
      T* row = img + y * res_;
      for (std::size_t x = 0; x < res_ / 2; ++x) std::swap(row[x], row[res_ - 1 - x]);
    }
  }

  void shift(T* img, long dy, long dx) const {
    std::vector<T> src(img, img + res_ * res_);
    const long r = static_cast<long>(res_);
    for (long y = 0; y < r; ++y)
      for (long x = 0; x < r; ++x) {
        const long sy = y - dy, sx = x - dx;
        img[y * r + x] =
            (sy >= 0 && sy < r && sx >= 0 && sx < r) ? src[sy * r + sx] : T(0);
      }
  }

  // out(p) = bilinear(in, c + R(-a)/s (p - c)), taps outside the frame drop.
  void warp(T* img, double angle, double scale) const {
    std::vector<T> src(img, img + res_ * res_);
    const double c = std::cos(angle) / scale, s = std::sin(angle) / scale;
    const double half = (static_cast<double>(res_) - 1.0) / 2.0;
    for (std::size_t y = 0; y < res_; ++y)
      for (std::size_t x = 0; x < res_; ++x) {
        const double dy = static_cast<double>(y) - half, dx = static_cast<double>(x) - half;
        const double sy = half + c * dy - s * dx;
        const double sx = half + s * dy + c * dx;
        img[y * res_ + x] = gather(src.data(), sy, sx);
      }
  }

  void warp_transpose(T* img, double angle, double scale) const {
    std::vector<T> g(img, img + res_ * res_);
    std::fill(img, img + res_ * res_, T(0));
    const double c = std::cos(angle) / scale, s = std::sin(angle) / scale;
    const double half = (static_cast<double>(res_) - 1.0) / 2.0;
    for (std::size_t y = 0; y < res_; ++y)
      for (std::size_t x = 0; x < res_; ++x) {
        const double dy = static_cast<double>(y) - half, dx = static_cast<double>(x) - half;
        const double sy = half + c * dy - s * dx;
        const double sx = half + s * dy + c * dx;
        scatter(img, sy, sx, g[y * res_ + x]);
      }
  }

  T gather(const T* src, double sy, double sx) const {
    const long y0 = static_cast<long>(std::floor(sy));
    const long x0 = static_cast<long>(std::floor(sx));
    const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
    T acc = T(0);
    const double w[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx};
    const long ys[4] = {y0, y0, y0 + 1, y0 + 1};
    const long xs[4] = {x0, x0 + 1, x0, x0 + 1};
    const long r = static_cast<long>(res_);
    for (int k = 0; k < 4; ++k)
      if (ys[k] >= 0 && ys[k] < r && xs[k] >= 0 && xs[k] < r)
        acc += static_cast<T>(w[k]) * src[ys[k] * r + xs[k]];
    return acc;
  }

  void scatter(T* dst, double sy, double sx, T v) const {
    const long y0 = static_cast<long>(std::floor(sy));
    const long x0 = static_cast<long>(std::floor(sx));
    const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
    const double w[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx};
    const long ys[4] = {y0, y0, y0 + 1, y0 + 1};
    const long xs[4] = {x0, x0 + 1, x0, x0 + 1};
    const long r = static_cast<long>(res_);
    for (int k = 0; k < 4; ++k)
      if (ys[k] >= 0 && ys[k] < r && xs[k] >= 0 && xs[k] < r)
        dst[ys[k] * r + xs[k]] += static_cast<T>(w[k]) * v;
  }

  void cutout(T* img, const AdaImagePlan& p, T fill) const {
    for (std::size_t y = p.cut_y; y < std::min(res_, p.cut_y + p.cut_side); ++y)
      for (std::size_t x = p.cut_x; x < std::min(res_, p.cut_x + p.cut_side); ++x)
        img[y * res_ + x] = fill;
  }

  std::size_t res_;
  std::vector<AdaImagePlan> plans_;
  std::vector<T> noise_;
};

// Draws one batch's transform. Consumes rng deterministically: category fire
// decisions always draw, parameter draws only on fire.
template <typename T>
AdaApplication<T> sample_ada_application(const AdaConfig& cfg, std::size_t batch,
                                         std::size_t resolution, double p, Rng& rng) {
  std::vector<AdaImagePlan> plans(batch);
  std::vector<T> noise;
  const long max_shift =
      static_cast<long>(cfg.max_translate * static_cast<double>(resolution));
  for (auto& plan : plans) {
    if (rng.bernoulli(p)) {
      plan.flip = rng.bernoulli(0.5);
      plan.shift_y = static_cast<long>(rng.uniform_int(2 * max_shift + 1)) - max_shift;
      plan.shift_x = static_cast<long>(rng.uniform_int(2 * max_shift + 1)) - max_shift;
    }
    if (rng.bernoulli(p)) {
      plan.has_geom = true;
      plan.rotate_rad = rng.uniform(-cfg.max_rotate_deg, cfg.max_rotate_deg) * M_PI / 180.0;
      plan.scale = std::exp(rng.uniform(std::log(cfg.scale_min), std::log(cfg.scale_max)));
    }
    if (rng.bernoulli(p)) {
      plan.has_color = true;
      plan.contrast = rng.uniform(cfg.contrast_min, cfg.contrast_max);
      plan.brightness = rng.uniform(-cfg.max_brightness, cfg.max_brightness);
    }
    if (rng.bernoulli(p)) {
      plan.has_noise = true;
      plan.noise_offset = noise.size();
      for (std::size_t k = 0; k < resolution * resolution; ++k)
        noise.push_back(static_cast<T>(rng.normal() * cfg.noise_std));
    }
    if (rng.bernoulli(p)) {
      plan.has_cutout = true;
      plan.cut_side = static_cast<std::size_t>(
          std::lround(cfg.cutout_frac * static_cast<double>(resolution)));
      plan.cut_y = rng.uniform_int(resolution - plan.cut_side + 1);
      plan.cut_x = rng.uniform_int(resolution - plan.cut_side + 1);
    }
  }
  return AdaApplication<T>(resolution, std::move(plans), std::move(noise));
}

// Probability controller driven by the sign of real-image discriminator
// logits.
struct AdaState {
  double p = 0.0;
  double sign_accum = 0.0;
  std::size_t minibatches_seen = 0;
};

// real_logit_sign_mean = mean over the minibatch of sign(D(real)).
void ada_update(AdaState& state, double real_logit_sign_mean, std::size_t batch,
                const AdaConfig& cfg);

}  // namespace synthlearn
