#pragma once

#include <memory>
#include <string>
#include <vector>

#include "synthlearn/layers.hpp"

namespace synthlearn {

// Flat parameter vector location of one named segment ("conv1.w", "fc.b", ...).
struct NamedParam {
  std::string name;
  std::size_t offset;
  std::size_t size;
};

template <typename T>
struct Trace {
  std::vector<LayerCache<T>> caches;
};

// Sequential network over a flat parameter vector. Forward is a pure function
// of (parameters, input, mode, dropout rng); all mutation happens through
// params() between steps.
template <typename T>
class Network {
public:
  void add(std::unique_ptr<Layer<T>> layer) {
    const std::size_t n = layer->param_count();
    NamedParam base{layer->name(), params_.size(), n};
    for (const auto& seg : layer->param_segments())
      index_.push_back({base.name + "." + seg.suffix, base.offset + seg.offset, seg.size});
    offsets_.push_back(base.offset);
    params_.resize(params_.size() + n);
    layers_.push_back(std::move(layer));
  }

  std::size_t layer_count() const { return layers_.size(); }
  const Layer<T>& layer(std::size_t i) const { return *layers_[i]; }
  std::size_t param_count() const { return params_.size(); }
  std::vector<T>& params() { return params_; }
  const std::vector<T>& params() const { return params_; }
  const std::vector<NamedParam>& param_index() const { return index_; }

  void init_params(Rng& rng) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
      layers_[i]->init_params(params_.data() + offsets_[i], rng);
  }

  std::vector<std::size_t> output_shape(std::vector<std::size_t> in) const {
    for (const auto& l : layers_) in = l->output_shape(in);
    return in;
  }

  Tensor<T> forward(const Tensor<T>& input, Mode mode, Rng* rng = nullptr,
                    Trace<T>* trace = nullptr) const {
    if (trace) trace->caches.assign(layers_.size(), LayerCache<T>{});
    Tensor<T> cur = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Tensor<T> next;
      layers_[i]->forward(params_.data() + offsets_[i], cur, next, mode, rng,
                          trace ? &trace->caches[i] : nullptr);
      cur = std::move(next);
    }
    return cur;
  }

  // Returns the gradient w.r.t. the network input. When param_grads is given
  // it must already be sized to param_count(); gradients accumulate into it.
  Tensor<T> backward(const Trace<T>& trace, const Tensor<T>& grad_output,
                     std::vector<T>* param_grads = nullptr) const {
    if (trace.caches.size() != layers_.size())
      throw ContractError("backward: trace does not match network");
    if (param_grads && param_grads->size() != params_.size())
      throw ContractError("backward: gradient buffer size mismatch");
    Tensor<T> cur = grad_output;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      Tensor<T> prev;
      layers_[i]->backward(params_.data() + offsets_[i], trace.caches[i], cur, prev,
                           param_grads ? param_grads->data() + offsets_[i] : nullptr);
      cur = std::move(prev);
    }
    return cur;
  }

private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<T> params_;
  std::vector<NamedParam> index_;
};

// Loss defined on a network's output batch. eval returns the scalar loss and,
// when grad_output is non-null, fills d(loss)/d(output).
template <typename T>
class OutputLoss {
public:
  virtual ~OutputLoss() = default;
  virtual std::string name() const = 0;
  virtual T eval(const Tensor<T>& output, Tensor<T>* grad_output) const = 0;
};

template <typename T>
struct LossAndGradients {
  T loss;
  std::vector<T> param_grads;
  Tensor<T> input_grad;
};

// Full reverse-mode pass: forward with trace, loss, backward.
template <typename T>
LossAndGradients<T> gradients(const Network<T>& net, const OutputLoss<T>& loss,
                              const Tensor<T>& input, Mode mode, Rng* rng = nullptr) {
  Trace<T> trace;
  Tensor<T> out = net.forward(input, mode, rng, &trace);
  Tensor<T> gout;
  LossAndGradients<T> r;
  r.loss = loss.eval(out, &gout);
  r.param_grads.assign(net.param_count(), T(0));
  r.input_grad = net.backward(trace, gout, &r.param_grads);
  return r;
}

// ---------------------------------------------------------------------------
// Adam with bias correction.
// ---------------------------------------------------------------------------
struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig cfg;
  std::vector<T> m, v;
  std::int64_t t = 0;

  explicit AdamState(std::size_t n = 0, AdamConfig c = {})
      : cfg(c), m(n, T(0)), v(n, T(0)) {}
};

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, AdamState<T>& st) {
  if (params.size() != grads.size() || params.size() != st.m.size())
    throw ContractError("adam_step: size mismatch");
  st.t += 1;
  const double b1 = st.cfg.beta1, b2 = st.cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = static_cast<double>(grads[i]);
    const double m = b1 * static_cast<double>(st.m[i]) + (1.0 - b1) * g;
    const double v = b2 * static_cast<double>(st.v[i]) + (1.0 - b2) * g * g;
    st.m[i] = static_cast<T>(m);
    st.v[i] = static_cast<T>(v);
    const double mhat = m / c1;
    const double vhat = v / c2;
    params[i] -= static_cast<T>(st.cfg.lr * mhat / (std::sqrt(vhat) + st.cfg.eps));
  }
}

}  // namespace synthlearn
