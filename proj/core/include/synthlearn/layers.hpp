#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "synthlearn/common.hpp"
#include "synthlearn/tensor.hpp"

namespace synthlearn {

enum class Mode { Train, Eval };

// Named slice of a layer's parameter block, offsets relative to the layer.
struct ParamSeg {
  std::string suffix;  // "w" or "b"
  std::size_t offset;
  std::size_t size;
};

// Per-layer state captured during forward and consumed by backward.
template <typename T>
struct LayerCache {
  std::vector<std::size_t> in_shape;
  Tensor<T> input;  // filled only by layers that need input values
  Tensor<T> aux;    // dropout mask, saturating-activation outputs
};

template <typename T>
class Layer {
public:
  virtual ~Layer() = default;
  virtual std::string name() const = 0;
  virtual std::size_t param_count() const { return 0; }
  virtual std::vector<ParamSeg> param_segments() const { return {}; }
  virtual void init_params(T* /*params*/, Rng& /*rng*/) const {}
  virtual std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const = 0;
  // cache may be null (inference without backprop); rng is consumed only by
  // stochastic layers in train mode.
  virtual void forward(const T* params, const Tensor<T>& in, Tensor<T>& out, Mode mode,
                       Rng* rng, LayerCache<T>* cache) const = 0;
  // param_grads may be null: propagate input gradients only (frozen network).
  virtual void backward(const T* params, const LayerCache<T>& cache, const Tensor<T>& grad_out,
                        Tensor<T>& grad_in, T* param_grads) const = 0;
};

// ---------------------------------------------------------------------------
// Dense: out = W x + b, W stored row-major [out_features][in_features]
// ---------------------------------------------------------------------------
template <typename T>
class DenseLayer final : public Layer<T> {
public:
  DenseLayer(std::string name, std::size_t in_features, std::size_t out_features)
      : name_(std::move(name)), in_(in_features), out_(out_features) {}

  std::string name() const override { return name_; }
  std::size_t param_count() const override { return out_ * in_ + out_; }
  std::vector<ParamSeg> param_segments() const override {
    return {{"w", 0, out_ * in_}, {"b", out_ * in_, out_}};
  }

  void init_params(T* p, Rng& rng) const override {
    const double std = std::sqrt(2.0 / static_cast<double>(in_));
    for (std::size_t i = 0; i < out_ * in_; ++i) p[i] = static_cast<T>(rng.normal() * std);
    for (std::size_t i = 0; i < out_; ++i) p[out_ * in_ + i] = T(0);
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 2 || in[1] != in_)
      throw ContractError(name_ + ": expected input (N, " + std::to_string(in_) + ")");
    return {in[0], out_};
  }

  void forward(const T* p, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    const std::size_t n = in.shape[0];
    out = Tensor<T>({n, out_});
    const T* b = p + out_ * in_;
    for (std::size_t i = 0; i < n; ++i) {
      const T* x = in.ptr() + i * in_;
      T* y = out.ptr() + i * out_;
      for (std::size_t o = 0; o < out_; ++o) {
        const T* w = p + o * in_;
        T acc = b[o];
        for (std::size_t k = 0; k < in_; ++k) acc += w[k] * x[k];
        y[o] = acc;
      }
    }
    if (cache) {
      cache->in_shape = in.shape;
      cache->input = in;
    }
  }

  void backward(const T* p, const LayerCache<T>& cache, const Tensor<T>& gout,
                Tensor<T>& gin, T* pg) const override {
    const std::size_t n = cache.in_shape[0];
    gin = Tensor<T>({n, in_});
    for (std::size_t i = 0; i < n; ++i) {
      const T* go = gout.ptr() + i * out_;
      T* gx = gin.ptr() + i * in_;
      for (std::size_t o = 0; o < out_; ++o) {
        const T g = go[o];
        if (g == T(0)) continue;
        const T* w = p + o * in_;
        for (std::size_t k = 0; k < in_; ++k) gx[k] += g * w[k];
      }
      if (pg) {
        const T* x = cache.input.ptr() + i * in_;
        T* gb = pg + out_ * in_;
        for (std::size_t o = 0; o < out_; ++o) {
          const T g = go[o];
          gb[o] += g;
          if (g == T(0)) continue;
          T* gw = pg + o * in_;
          for (std::size_t k = 0; k < in_; ++k) gw[k] += g * x[k];
        }
      }
    }
  }

private:
  std::string name_;
  std::size_t in_, out_;
};

// ---------------------------------------------------------------------------
// Conv3x3, stride 1, zero padding 1 (same-size). W layout [co][ci][ky][kx].
// ---------------------------------------------------------------------------
template <typename T>
class Conv3x3Layer final : public Layer<T> {
public:
  Conv3x3Layer(std::string name, std::size_t in_ch, std::size_t out_ch)
      : name_(std::move(name)), ci_(in_ch), co_(out_ch) {}

  std::string name() const override { return name_; }
  std::size_t param_count() const override { return co_ * ci_ * 9 + co_; }
  std::vector<ParamSeg> param_segments() const override {
    return {{"w", 0, co_ * ci_ * 9}, {"b", co_ * ci_ * 9, co_}};
  }

  void init_params(T* p, Rng& rng) const override {
    const double std = std::sqrt(2.0 / static_cast<double>(ci_ * 9));
    for (std::size_t i = 0; i < co_ * ci_ * 9; ++i) p[i] = static_cast<T>(rng.normal() * std);
    for (std::size_t i = 0; i < co_; ++i) p[co_ * ci_ * 9 + i] = T(0);
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4 || in[1] != ci_)
      throw ContractError(name_ + ": expected input (N, " + std::to_string(ci_) + ", H, W)");
    return {in[0], co_, in[2], in[3]};
  }

  void forward(const T* p, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    const std::size_t n = in.shape[0], h = in.shape[2], w = in.shape[3];
    out = Tensor<T>({n, co_, h, w});
    const std::size_t ph = h + 2, pw = w + 2;
    std::vector<T> pad(ci_ * ph * pw);
    const T* bias = p + co_ * ci_ * 9;

    for (std::size_t img = 0; img < n; ++img) {
      pad_input(in, img, h, w, pad.data());
      for (std::size_t o = 0; o < co_; ++o) {
        T* orow0 = out.ptr() + ((img * co_ + o) * h) * w;
        for (std::size_t i = 0; i < h * w; ++i) orow0[i] = bias[o];
        for (std::size_t c = 0; c < ci_; ++c) {
          const T* wk = p + (o * ci_ + c) * 9;
          const T* prow = pad.data() + c * ph * pw;
          for (std::size_t y = 0; y < h; ++y) {
            T* orow = orow0 + y * w;
            for (std::size_t k = 0; k < 9; ++k) {
              const T wv = wk[k];
              const T* src = prow + (y + k / 3) * pw + (k % 3);
              for (std::size_t x = 0; x < w; ++x) orow[x] += wv * src[x];
            }
          }
        }
      }
    }
    if (cache) {
      cache->in_shape = in.shape;
      cache->input = in;
    }
  }

  void backward(const T* p, const LayerCache<T>& cache, const Tensor<T>& gout,
                Tensor<T>& gin, T* pg) const override {
    const std::size_t n = cache.in_shape[0], h = cache.in_shape[2], w = cache.in_shape[3];
    gin = Tensor<T>({n, ci_, h, w});
    const std::size_t ph = h + 2, pw = w + 2;
    std::vector<T> gpad(co_ * ph * pw);
    std::vector<T> ipad;
    if (pg) ipad.resize(ci_ * ph * pw);

    for (std::size_t img = 0; img < n; ++img) {
      // zero-pad this image's output gradient once
      std::fill(gpad.begin(), gpad.end(), T(0));
      for (std::size_t o = 0; o < co_; ++o) {
        const T* grow = gout.ptr() + ((img * co_ + o) * h) * w;
        T* dst = gpad.data() + o * ph * pw + pw + 1;
        for (std::size_t y = 0; y < h; ++y)
          std::copy(grow + y * w, grow + (y + 1) * w, dst + y * pw);
      }
      // input gradient: correlate padded gout with the flipped kernel
      for (std::size_t c = 0; c < ci_; ++c) {
        T* grow0 = gin.ptr() + ((img * ci_ + c) * h) * w;
        for (std::size_t o = 0; o < co_; ++o) {
          const T* wk = p + (o * ci_ + c) * 9;
          const T* prow = gpad.data() + o * ph * pw;
          for (std::size_t y = 0; y < h; ++y) {
            T* grow = grow0 + y * w;
            for (std::size_t k = 0; k < 9; ++k) {
              const T wv = wk[k];
              const T* src = prow + (y + 2 - k / 3) * pw + (2 - k % 3);
              for (std::size_t x = 0; x < w; ++x) grow[x] += wv * src[x];
            }
          }
        }
      }
      if (pg) {
        pad_input(cache.input, img, h, w, ipad.data());
        T* gb = pg + co_ * ci_ * 9;
        for (std::size_t o = 0; o < co_; ++o) {
          const T* grow0 = gout.ptr() + ((img * co_ + o) * h) * w;
          T bacc = T(0);
          for (std::size_t i = 0; i < h * w; ++i) bacc += grow0[i];
          gb[o] += bacc;
          for (std::size_t c = 0; c < ci_; ++c) {
            T* gw = pg + (o * ci_ + c) * 9;
            const T* prow = ipad.data() + c * ph * pw;
            for (std::size_t k = 0; k < 9; ++k) {
              T acc = T(0);
              for (std::size_t y = 0; y < h; ++y) {
                const T* g = grow0 + y * w;
                const T* src = prow + (y + k / 3) * pw + (k % 3);
                for (std::size_t x = 0; x < w; ++x) acc += g[x] * src[x];
              }
              gw[k] += acc;
            }
          }
        }
      }
    }
  }

private:
  void pad_input(const Tensor<T>& in, std::size_t img, std::size_t h, std::size_t w,
                 T* pad) const {
    const std::size_t ph = h + 2, pw = w + 2;
    std::fill(pad, pad + ci_ * ph * pw, T(0));
    for (std::size_t c = 0; c < ci_; ++c) {
      const T* src = in.ptr() + ((img * ci_ + c) * h) * w;
      T* dst = pad + c * ph * pw + pw + 1;
      for (std::size_t y = 0; y < h; ++y)
        std::copy(src + y * w, src + (y + 1) * w, dst + y * pw);
    }
  }

  std::string name_;
  std::size_t ci_, co_;
};

// ---------------------------------------------------------------------------
// LeakyReLU
// ---------------------------------------------------------------------------
template <typename T>
class LeakyReluLayer final : public Layer<T> {
public:
  LeakyReluLayer(std::string name, double slope = 0.2)
      : name_(std::move(name)), slope_(static_cast<T>(slope)) {}

  std::string name() const override { return name_; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return in;
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    out = Tensor<T>(in.shape);
    for (std::size_t i = 0; i < in.count(); ++i) {
      const T v = in[i];
      out[i] = v >= T(0) ? v : slope_ * v;
    }
    if (cache) {
      cache->in_shape = in.shape;
      cache->input = in;
    }
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    gin = Tensor<T>(cache.in_shape);
    for (std::size_t i = 0; i < gout.count(); ++i)
      gin[i] = cache.input[i] >= T(0) ? gout[i] : slope_ * gout[i];
  }

private:
  std::string name_;
  T slope_;
};

// ---------------------------------------------------------------------------
// Tanh (generator head)
// ---------------------------------------------------------------------------
template <typename T>
class TanhLayer final : public Layer<T> {
public:
  explicit TanhLayer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return in;
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    out = Tensor<T>(in.shape);
    for (std::size_t i = 0; i < in.count(); ++i) out[i] = std::tanh(in[i]);
    if (cache) {
      cache->in_shape = in.shape;
      cache->aux = out;
    }
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    gin = Tensor<T>(cache.in_shape);
    for (std::size_t i = 0; i < gout.count(); ++i) {
      const T y = cache.aux[i];
      gin[i] = gout[i] * (T(1) - y * y);
    }
  }

private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Sigmoid (classifier head)
// ---------------------------------------------------------------------------
template <typename T>
class SigmoidLayer final : public Layer<T> {
public:
  explicit SigmoidLayer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return in;
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    out = Tensor<T>(in.shape);
    for (std::size_t i = 0; i < in.count(); ++i)
      out[i] = static_cast<T>(sigmoid(static_cast<double>(in[i])));
    if (cache) {
      cache->in_shape = in.shape;
      cache->aux = out;
    }
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    gin = Tensor<T>(cache.in_shape);
    for (std::size_t i = 0; i < gout.count(); ++i) {
      const T y = cache.aux[i];
      gin[i] = gout[i] * y * (T(1) - y);
    }
  }

private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Dropout (inverted scaling; identity in eval mode)
// ---------------------------------------------------------------------------
template <typename T>
class DropoutLayer final : public Layer<T> {
public:
  DropoutLayer(std::string name, double p) : name_(std::move(name)), p_(p) {}
  std::string name() const override { return name_; }
  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    return in;
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode mode, Rng* rng,
               LayerCache<T>* cache) const override {
    out = Tensor<T>(in.shape);
    if (mode == Mode::Eval || p_ == 0.0) {
      out.data = in.data;
      if (cache) {
        cache->in_shape = in.shape;
        cache->aux = Tensor<T>();  // empty marks identity
      }
      return;
    }
    if (!rng) throw ContractError(name_ + ": train-mode dropout needs an rng");
    Tensor<T> mask(in.shape);
    const T keep_scale = static_cast<T>(1.0 / (1.0 - p_));
    for (std::size_t i = 0; i < in.count(); ++i) {
      mask[i] = rng->uniform() < p_ ? T(0) : keep_scale;
      out[i] = in[i] * mask[i];
    }
    if (cache) {
      cache->in_shape = in.shape;
      cache->aux = std::move(mask);
    }
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    gin = Tensor<T>(cache.in_shape);
    if (cache.aux.count() == 0) {
      gin.data = gout.data;
      return;
    }
    for (std::size_t i = 0; i < gout.count(); ++i) gin[i] = gout[i] * cache.aux[i];
  }

  double drop_probability() const { return p_; }

private:
  std::string name_;
  double p_;
};

// ---------------------------------------------------------------------------
// AvgPool 2x2, stride 2
// ---------------------------------------------------------------------------
template <typename T>
class AvgPool2Layer final : public Layer<T> {
public:
  explicit AvgPool2Layer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4 || in[2] % 2 != 0 || in[3] % 2 != 0)
      throw ContractError(name_ + ": needs NCHW input with even H, W");
    return {in[0], in[1], in[2] / 2, in[3] / 2};
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    const std::size_t nc = in.shape[0] * in.shape[1], h = in.shape[2], w = in.shape[3];
    out = Tensor<T>({in.shape[0], in.shape[1], h / 2, w / 2});
    for (std::size_t p = 0; p < nc; ++p) {
      const T* src = in.ptr() + p * h * w;
      T* dst = out.ptr() + p * (h / 2) * (w / 2);
      for (std::size_t y = 0; y < h / 2; ++y) {
        const T* r0 = src + 2 * y * w;
        const T* r1 = r0 + w;
        T* d = dst + y * (w / 2);
        for (std::size_t x = 0; x < w / 2; ++x)
          d[x] = (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]) * T(0.25);
      }
    }
    if (cache) cache->in_shape = in.shape;
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    const std::size_t nc = cache.in_shape[0] * cache.in_shape[1];
    const std::size_t h = cache.in_shape[2], w = cache.in_shape[3];
    gin = Tensor<T>(cache.in_shape);
    for (std::size_t p = 0; p < nc; ++p) {
      const T* g = gout.ptr() + p * (h / 2) * (w / 2);
      T* dst = gin.ptr() + p * h * w;
      for (std::size_t y = 0; y < h / 2; ++y) {
        T* r0 = dst + 2 * y * w;
        T* r1 = r0 + w;
        for (std::size_t x = 0; x < w / 2; ++x) {
          const T v = g[y * (w / 2) + x] * T(0.25);
          r0[2 * x] = v;
          r0[2 * x + 1] = v;
          r1[2 * x] = v;
          r1[2 * x + 1] = v;
        }
      }
    }
  }

private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Global average pool: NCHW -> (N, C)
// ---------------------------------------------------------------------------
template <typename T>
class GlobalAvgPoolLayer final : public Layer<T> {
public:
  explicit GlobalAvgPoolLayer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4) throw ContractError(name_ + ": needs NCHW input");
    return {in[0], in[1]};
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    const std::size_t nc = in.shape[0] * in.shape[1], hw = in.shape[2] * in.shape[3];
    out = Tensor<T>({in.shape[0], in.shape[1]});
    const T inv = T(1) / static_cast<T>(hw);
    for (std::size_t p = 0; p < nc; ++p) {
      const T* src = in.ptr() + p * hw;
      T acc = T(0);
      for (std::size_t i = 0; i < hw; ++i) acc += src[i];
      out[p] = acc * inv;
    }
    if (cache) cache->in_shape = in.shape;
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    const std::size_t nc = cache.in_shape[0] * cache.in_shape[1];
    const std::size_t hw = cache.in_shape[2] * cache.in_shape[3];
    gin = Tensor<T>(cache.in_shape);
    const T inv = T(1) / static_cast<T>(hw);
    for (std::size_t p = 0; p < nc; ++p) {
      const T v = gout[p] * inv;
      T* dst = gin.ptr() + p * hw;
      for (std::size_t i = 0; i < hw; ++i) dst[i] = v;
    }
  }

private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Nearest-neighbor 2x upsample
// ---------------------------------------------------------------------------
template <typename T>
class Upsample2Layer final : public Layer<T> {
public:
  explicit Upsample2Layer(std::string name) : name_(std::move(name)) {}
  std::string name() const override { return name_; }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 4) throw ContractError(name_ + ": needs NCHW input");
    return {in[0], in[1], in[2] * 2, in[3] * 2};
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    const std::size_t nc = in.shape[0] * in.shape[1], h = in.shape[2], w = in.shape[3];
    out = Tensor<T>({in.shape[0], in.shape[1], h * 2, w * 2});
    for (std::size_t p = 0; p < nc; ++p) {
      const T* src = in.ptr() + p * h * w;
      T* dst = out.ptr() + p * 4 * h * w;
      for (std::size_t y = 0; y < h; ++y) {
        T* r0 = dst + 2 * y * 2 * w;
        T* r1 = r0 + 2 * w;
        const T* s = src + y * w;
        for (std::size_t x = 0; x < w; ++x) {
          r0[2 * x] = s[x];
          r0[2 * x + 1] = s[x];
          r1[2 * x] = s[x];
          r1[2 * x + 1] = s[x];
        }
      }
    }
    if (cache) cache->in_shape = in.shape;
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    const std::size_t nc = cache.in_shape[0] * cache.in_shape[1];
    const std::size_t h = cache.in_shape[2], w = cache.in_shape[3];
    gin = Tensor<T>(cache.in_shape);
    for (std::size_t p = 0; p < nc; ++p) {
      const T* g = gout.ptr() + p * 4 * h * w;
      T* dst = gin.ptr() + p * h * w;
      for (std::size_t y = 0; y < h; ++y) {
        const T* r0 = g + 2 * y * 2 * w;
        const T* r1 = r0 + 2 * w;
        T* d = dst + y * w;
        for (std::size_t x = 0; x < w; ++x)
          d[x] = r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1];
      }
    }
  }

private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Reshape (count-preserving)
// ---------------------------------------------------------------------------
template <typename T>
class ReshapeLayer final : public Layer<T> {
public:
  // target shape excludes the batch dimension
  ReshapeLayer(std::string name, std::vector<std::size_t> tail)
      : name_(std::move(name)), tail_(std::move(tail)) {}
  std::string name() const override { return name_; }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    std::size_t want = 1;
    for (auto d : tail_) want *= d;
    std::size_t have = 1;
    for (std::size_t i = 1; i < in.size(); ++i) have *= in[i];
    if (want != have) throw ContractError(name_ + ": element count mismatch");
    std::vector<std::size_t> out{in[0]};
    out.insert(out.end(), tail_.begin(), tail_.end());
    return out;
  }

  void forward(const T*, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    out.shape = output_shape(in.shape);
    out.data = in.data;
    if (cache) cache->in_shape = in.shape;
  }

  void backward(const T*, const LayerCache<T>& cache, const Tensor<T>& gout, Tensor<T>& gin,
                T*) const override {
    gin.shape = cache.in_shape;
    gin.data = gout.data;
  }

private:
  std::string name_;
  std::vector<std::size_t> tail_;
};

// ---------------------------------------------------------------------------
// Generator stem: input (N, latent + classes) where the tail is a one-hot
// class vector; output (N, latent + embed) = [z, W onehot + b].
// ---------------------------------------------------------------------------
template <typename T>
class ClassEmbedLayer final : public Layer<T> {
public:
  ClassEmbedLayer(std::string name, std::size_t latent, std::size_t classes, std::size_t embed)
      : name_(std::move(name)), latent_(latent), classes_(classes), embed_(embed) {}

  std::string name() const override { return name_; }
  std::size_t param_count() const override { return embed_ * classes_ + embed_; }
  std::vector<ParamSeg> param_segments() const override {
    return {{"w", 0, embed_ * classes_}, {"b", embed_ * classes_, embed_}};
  }

  void init_params(T* p, Rng& rng) const override {
    const double std = std::sqrt(2.0 / static_cast<double>(classes_));
    for (std::size_t i = 0; i < embed_ * classes_; ++i)
      p[i] = static_cast<T>(rng.normal() * std);
    for (std::size_t i = 0; i < embed_; ++i) p[embed_ * classes_ + i] = T(0);
  }

  std::vector<std::size_t> output_shape(const std::vector<std::size_t>& in) const override {
    if (in.size() != 2 || in[1] != latent_ + classes_)
      throw ContractError(name_ + ": expected input (N, latent + classes)");
    return {in[0], latent_ + embed_};
  }

  void forward(const T* p, const Tensor<T>& in, Tensor<T>& out, Mode, Rng*,
               LayerCache<T>* cache) const override {
    const std::size_t n = in.shape[0];
    out = Tensor<T>({n, latent_ + embed_});
    const T* b = p + embed_ * classes_;
    for (std::size_t i = 0; i < n; ++i) {
      const T* x = in.ptr() + i * (latent_ + classes_);
      T* y = out.ptr() + i * (latent_ + embed_);
      std::copy(x, x + latent_, y);
      const T* onehot = x + latent_;
      for (std::size_t e = 0; e < embed_; ++e) {
        const T* w = p + e * classes_;
        T acc = b[e];
        for (std::size_t k = 0; k < classes_; ++k) acc += w[k] * onehot[k];
        y[latent_ + e] = acc;
      }
    }
    if (cache) {
      cache->in_shape = in.shape;
      cache->input = in;
    }
  }

  void backward(const T* p, const LayerCache<T>& cache, const Tensor<T>& gout,
                Tensor<T>& gin, T* pg) const override {
    const std::size_t n = cache.in_shape[0];
    gin = Tensor<T>({n, latent_ + classes_});
    for (std::size_t i = 0; i < n; ++i) {
      const T* go = gout.ptr() + i * (latent_ + embed_);
      T* gx = gin.ptr() + i * (latent_ + classes_);
      std::copy(go, go + latent_, gx);
      T* gonehot = gx + latent_;
      for (std::size_t e = 0; e < embed_; ++e) {
        const T g = go[latent_ + e];
        const T* w = p + e * classes_;
        for (std::size_t k = 0; k < classes_; ++k) gonehot[k] += g * w[k];
      }
      if (pg) {
        const T* onehot = cache.input.ptr() + i * (latent_ + classes_) + latent_;
        T* gb = pg + embed_ * classes_;
        for (std::size_t e = 0; e < embed_; ++e) {
          const T g = go[latent_ + e];
          gb[e] += g;
          T* gw = pg + e * classes_;
          for (std::size_t k = 0; k < classes_; ++k) gw[k] += g * onehot[k];
        }
      }
    }
  }

private:
  std::string name_;
  std::size_t latent_, classes_, embed_;
};

}  // namespace synthlearn
