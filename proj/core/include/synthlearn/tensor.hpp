#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "synthlearn/common.hpp"

namespace synthlearn {

// Dense row-major tensor. Activations use NCHW, vectors use {N, F}.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(count(), T(0));
  }

  std::size_t count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  std::size_t dim(std::size_t i) const { return shape.at(i); }
  std::size_t rank() const { return shape.size(); }

  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }

  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  // NCHW addressing
  T& at4(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data[((n * shape[1] + c) * shape[2] + y) * shape[3] + x];
  }
  const T& at4(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data[((n * shape[1] + c) * shape[2] + y) * shape[3] + x];
  }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(shape[i]);
    }
    return s + ")";
  }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

template <typename T>
void require_shape(const Tensor<T>& t, const std::vector<std::size_t>& shape,
                   const std::string& what) {
  if (t.shape != shape) {
    Tensor<T> want(shape);
    throw ContractError(what + ": shape mismatch, got " + t.shape_str() + ", want " +
                        want.shape_str());
  }
}

}  // namespace synthlearn
