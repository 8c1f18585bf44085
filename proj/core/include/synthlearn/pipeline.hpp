#pragma once

#include <array>
#include <string>
#include <vector>

#include "synthlearn/image.hpp"
#include "synthlearn/tensor.hpp"

namespace synthlearn {

// ---------------------------------------------------------------------------
// Dataset: square grayscale images in unit range with a conditioning class id
// and a binary downstream label.
// ---------------------------------------------------------------------------
struct ImageDataset {
  std::size_t resolution = 0;
  std::size_t class_count = 2;
  std::vector<GrayImage> images;
  std::vector<std::size_t> class_ids;
  std::vector<int> labels;

  std::size_t size() const { return images.size(); }
  void push(GrayImage img, std::size_t class_id, int label);
  void validate() const;
};

// Conditioning subclasses. Index 0 is the normal class; nonzero ids carry a
// positive binary label.
const std::vector<std::string>& subclass_names();

void save_dataset(const std::string& dir, const ImageDataset& ds, int bit_depth = 16);
ImageDataset load_dataset(const std::string& dir);

// Batch assembly. Signed batches feed the GAN ([-1, 1]); unit batches feed
// classifier normalization.
Tensor<float> batch_signed(const ImageDataset& ds, const std::vector<std::size_t>& idx);
Tensor<float> batch_unit(const ImageDataset& ds, const std::vector<std::size_t>& idx);

// ---------------------------------------------------------------------------
// Geometry ops
// ---------------------------------------------------------------------------

// Square crop of side min(h, w); offsets round down.
GrayImage center_square_crop(const GrayImage& img);

// Nearest-neighbour resample, pixel-center index mapping.
GrayImage nearest_resize(const GrayImage& img, std::size_t out_side);

// Per-axis bilinear sampling table, half-pixel centers, edges clamped.
struct LinearTap {
  std::size_t lo, hi;
  double frac;
};
std::vector<LinearTap> bilinear_taps(std::size_t in_size, std::size_t out_size);

template <typename T>
Tensor<T> bilinear_resize(const Tensor<T>& in, std::size_t oh, std::size_t ow) {
  const std::size_t nc = in.dim(0) * in.dim(1), ih = in.dim(2), iw = in.dim(3);
  const auto ty = bilinear_taps(ih, oh);
  const auto tx = bilinear_taps(iw, ow);
  Tensor<T> out({in.dim(0), in.dim(1), oh, ow});
  for (std::size_t p = 0; p < nc; ++p) {
    const T* src = in.ptr() + p * ih * iw;
    T* dst = out.ptr() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      const T fy = static_cast<T>(ty[y].frac);
      const T* r0 = src + ty[y].lo * iw;
      const T* r1 = src + ty[y].hi * iw;
      for (std::size_t x = 0; x < ow; ++x) {
        const T fx = static_cast<T>(tx[x].frac);
        const T top = r0[tx[x].lo] + fx * (r0[tx[x].hi] - r0[tx[x].lo]);
        const T bot = r1[tx[x].lo] + fx * (r1[tx[x].hi] - r1[tx[x].lo]);
        dst[y * ow + x] = top + fy * (bot - top);
      }
    }
  }
  return out;
}

// Exact transpose of bilinear_resize for the same shapes.
template <typename T>
Tensor<T> bilinear_resize_backward(const Tensor<T>& gout, std::size_t ih, std::size_t iw) {
  const std::size_t nc = gout.dim(0) * gout.dim(1), oh = gout.dim(2), ow = gout.dim(3);
  const auto ty = bilinear_taps(ih, oh);
  const auto tx = bilinear_taps(iw, ow);
  Tensor<T> gin({gout.dim(0), gout.dim(1), ih, iw});
  for (std::size_t p = 0; p < nc; ++p) {
    const T* g = gout.ptr() + p * oh * ow;
    T* dst = gin.ptr() + p * ih * iw;
    for (std::size_t y = 0; y < oh; ++y) {
      const T fy = static_cast<T>(ty[y].frac);
      T* r0 = dst + ty[y].lo * iw;
      T* r1 = dst + ty[y].hi * iw;
      for (std::size_t x = 0; x < ow; ++x) {
        const T fx = static_cast<T>(tx[x].frac);
        const T v = g[y * ow + x];
        r0[tx[x].lo] += v * (T(1) - fy) * (T(1) - fx);
        r0[tx[x].hi] += v * (T(1) - fy) * fx;
        r1[tx[x].lo] += v * fy * (T(1) - fx);
        r1[tx[x].hi] += v * fy * fx;
      }
    }
  }
  return gin;
}

// ---------------------------------------------------------------------------
// Classifier input normalization: unit grayscale (N,1,H,W) -> bilinear resize
// to the classifier resolution, channel replication to 3, then per-channel
// (v - mean) / std. Linear in the pixels, so the backward pass is the exact
// transpose.
// ---------------------------------------------------------------------------
struct NormalizeSpec {
  std::size_t resolution = 224;
  std::array<double, 3> mean{0.485, 0.456, 0.406};
  std::array<double, 3> std{0.229, 0.224, 0.225};
};

template <typename T>
Tensor<T> classifier_normalize(const Tensor<T>& unit_images, const NormalizeSpec& spec) {
  if (unit_images.dim(1) != 1)
    throw ContractError("classifier_normalize: expected 1-channel input");
  Tensor<T> resized = bilinear_resize(unit_images, spec.resolution, spec.resolution);
  const std::size_t n = resized.dim(0), hw = spec.resolution * spec.resolution;
  Tensor<T> out({n, 3, spec.resolution, spec.resolution});
  for (std::size_t i = 0; i < n; ++i) {
    const T* src = resized.ptr() + i * hw;
    for (std::size_t c = 0; c < 3; ++c) {
      const T mean = static_cast<T>(spec.mean[c]);
      const T inv_std = static_cast<T>(1.0 / spec.std[c]);
      T* dst = out.ptr() + (i * 3 + c) * hw;
      for (std::size_t k = 0; k < hw; ++k) dst[k] = (src[k] - mean) * inv_std;
    }
  }
  return out;
}

template <typename T>
Tensor<T> classifier_normalize_backward(const Tensor<T>& gout, const NormalizeSpec& spec,
                                        std::size_t ih, std::size_t iw) {
  if (gout.dim(1) != 3 || gout.dim(2) != spec.resolution || gout.dim(3) != spec.resolution)
    throw ContractError("classifier_normalize_backward: gradient shape mismatch");
  const std::size_t n = gout.dim(0), hw = spec.resolution * spec.resolution;
  Tensor<T> folded({n, 1, spec.resolution, spec.resolution});
  for (std::size_t i = 0; i < n; ++i) {
    T* dst = folded.ptr() + i * hw;
    for (std::size_t c = 0; c < 3; ++c) {
      const T inv_std = static_cast<T>(1.0 / spec.std[c]);
      const T* src = gout.ptr() + (i * 3 + c) * hw;
      for (std::size_t k = 0; k < hw; ++k) dst[k] += src[k] * inv_std;
    }
  }
  return bilinear_resize_backward(folded, ih, iw);
}

// ---------------------------------------------------------------------------
// Classifier training augmentation: horizontal flip, small rotation, random
// resized square crop. Applied before normalization, unit range preserved.
// ---------------------------------------------------------------------------
struct AugmentConfig {
  double flip_p = 0.3;
  double max_rotate_deg = 5.0;
  double crop_scale_min = 0.8;
  double crop_scale_max = 1.0;
};

GrayImage classifier_augment(const GrayImage& img, const AugmentConfig& cfg, Rng& rng);

// ---------------------------------------------------------------------------
// Corpus preprocessing: center square crop, nearest resample to the target
// side, rejection of small or multi-finding images.
// ---------------------------------------------------------------------------
struct PreprocessConfig {
  std::size_t target_resolution = 256;
  std::size_t min_dimension = 128;
  std::size_t class_count = 2;
  int bit_depth = 16;
};

struct PreprocessReport {
  std::size_t accepted = 0;
  std::size_t rejected_small = 0;
  std::size_t rejected_multilabel = 0;
  std::size_t rejected_unreadable = 0;
};

// in_dir must hold labels.csv (filename,findings with ';'-separated findings)
// and the referenced PGM files. Writes a dataset directory to out_dir.
PreprocessReport preprocess_corpus(const std::string& in_dir, const std::string& out_dir,
                                   const PreprocessConfig& cfg);

}  // namespace synthlearn
