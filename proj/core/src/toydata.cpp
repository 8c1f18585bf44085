#include "synthlearn/toydata.hpp"

#include <cmath>

namespace synthlearn {

namespace {

// Paint over the image: lerp each pixel toward `value` by the shape coverage.
void paint(GrayImage& img, double value, double cov, std::size_t y, std::size_t x) {
  float& p = img.at(y, x);
  p = static_cast<float>(p + cov * (value - p));
}

// Brighten additively by coverage * boost.
void glow(GrayImage& img, double boost, double cov, std::size_t y, std::size_t x) {
  img.at(y, x) += static_cast<float>(cov * boost);
}

// Coverage from a signed distance, ~1px anti-aliased edge.
double edge(double d) { return std::clamp(0.5 - d, 0.0, 1.0); }

double rounded_rect_sdf(double y, double x, double cy, double cx, double hh, double hw,
                        double r) {
  const double qy = std::abs(y - cy) - (hh - r);
  const double qx = std::abs(x - cx) - (hw - r);
  const double oy = std::max(qy, 0.0), ox = std::max(qx, 0.0);
  return std::sqrt(oy * oy + ox * ox) + std::min(std::max(qy, qx), 0.0) - r;
}

double disk_sdf(double y, double x, double cy, double cx, double r) {
  const double dy = y - cy, dx = x - cx;
  return std::sqrt(dy * dy + dx * dx) - r;
}

double capsule_sdf(double y, double x, double y0, double x0, double y1, double x1, double r) {
  const double py = y - y0, px = x - x0;
  const double by = y1 - y0, bx = x1 - x0;
  const double bb = by * by + bx * bx;
  const double t = bb > 0 ? std::clamp((py * by + px * bx) / bb, 0.0, 1.0) : 0.0;
  const double dy = py - t * by, dx = px - t * bx;
  return std::sqrt(dy * dy + dx * dx) - r;
}

struct Bounds {
  std::size_t y0, y1, x0, x1;  // half-open
};

Bounds clip(const GrayImage& img, double cy, double cx, double ry, double rx) {
  const double m = 2.0;  // AA margin
  const auto lo = [](double v) {
    return static_cast<std::size_t>(std::max(0.0, std::floor(v)));
  };
  Bounds b;
  b.y0 = lo(cy - ry - m);
  b.x0 = lo(cx - rx - m);
  b.y1 = std::min(img.height, static_cast<std::size_t>(std::max(0.0, std::ceil(cy + ry + m))));
  b.x1 = std::min(img.width, static_cast<std::size_t>(std::max(0.0, std::ceil(cx + rx + m))));
  return b;
}

void paint_rounded_rect(GrayImage& img, double cy, double cx, double hh, double hw, double r,
                        double value) {
  const Bounds b = clip(img, cy, cx, hh, hw);
  for (std::size_t y = b.y0; y < b.y1; ++y)
    for (std::size_t x = b.x0; x < b.x1; ++x)
      paint(img, value, edge(rounded_rect_sdf(y, x, cy, cx, hh, hw, r)), y, x);
}

void glow_disk(GrayImage& img, double cy, double cx, double r, double boost) {
  const Bounds b = clip(img, cy, cx, r, r);
  for (std::size_t y = b.y0; y < b.y1; ++y)
    for (std::size_t x = b.x0; x < b.x1; ++x)
      glow(img, boost, edge(disk_sdf(y, x, cy, cx, r)), y, x);
}

void glow_capsule(GrayImage& img, double y0, double x0, double y1, double x1, double r,
                  double boost) {
  const double cy = (y0 + y1) / 2, cx = (x0 + x1) / 2;
  const double ry = std::abs(y1 - y0) / 2 + r, rx = std::abs(x1 - x0) / 2 + r;
  const Bounds b = clip(img, cy, cx, ry, rx);
  for (std::size_t y = b.y0; y < b.y1; ++y)
    for (std::size_t x = b.x0; x < b.x1; ++x)
      glow(img, boost, edge(capsule_sdf(y, x, y0, x0, y1, x1, r)), y, x);
}

struct SpineLayout {
  std::size_t vertebrae;
  double unit, gap_frac, top;
  double half_width, sway_amp, sway_freq, sway_phase, center_x;
  double bone_value;

  double center_y(std::size_t i) const { return top + unit * (i + 0.5); }
  double column_x(double y, double res) const {
    return center_x + sway_amp * std::sin(2.0 * M_PI * sway_freq * y / res + sway_phase);
  }
};

GrayImage render_toy(std::size_t res, std::size_t subclass, double noise_std, Rng& rng) {
  const double r = static_cast<double>(res);
  GrayImage img(res, res, ValueRange::Unit);

  // background: soft vertical gradient with a small tilt
  const double base = 0.18 + rng.uniform(-0.01, 0.01);
  const double tilt = rng.uniform(-0.02, 0.02);
  for (std::size_t y = 0; y < res; ++y)
    for (std::size_t x = 0; x < res; ++x)
      img.at(y, x) = static_cast<float>(base + 0.14 * (y / r) + tilt * (x / r - 0.5));

  SpineLayout sp;
  sp.vertebrae = 5 + rng.uniform_int(4);
  sp.top = 0.08 * r;
  sp.unit = 0.84 * r / static_cast<double>(sp.vertebrae);
  sp.gap_frac = rng.uniform(0.18, 0.26);
  sp.half_width = rng.uniform(0.09, 0.10) * r;
  sp.sway_amp = rng.uniform(0.0, 0.03) * r;
  sp.sway_freq = rng.uniform(0.5, 1.0);
  sp.sway_phase = rng.uniform(0.0, 2.0 * M_PI);
  sp.center_x = (0.5 + rng.uniform(-0.04, 0.04)) * r;
  sp.bone_value = rng.uniform(0.60, 0.64);

  const std::size_t pick = 1 + rng.uniform_int(sp.vertebrae - 2);  // interior vertebra
  const double vert_hh = sp.unit * (1.0 - sp.gap_frac) / 2.0;

  // vertebra geometry overrides for structural findings
  for (std::size_t i = 0; i < sp.vertebrae; ++i) {
    const double cy = sp.center_y(i);
    const double cx = sp.column_x(cy, r);
    double hh = vert_hh, hw = sp.half_width;
    double value = sp.bone_value + rng.uniform(-0.01, 0.01);
    if (subclass == 1 && i == pick) {  // collapsed: squat, wide, dense
      hh *= 0.5;
      hw *= 1.5;
      value += 0.20;
    }
    if (subclass == 2 && (i == pick || i == pick + 1)) {
      // narrowed disc: neighbours grow toward the gap
      hh += sp.unit * sp.gap_frac * 0.375;
    }
    const double corner = 0.4 * std::min(hh, hw);
    double cy_draw = cy;
    if (subclass == 2 && i == pick) cy_draw += sp.unit * sp.gap_frac * 0.375;
    if (subclass == 2 && i == pick + 1) cy_draw -= sp.unit * sp.gap_frac * 0.375;
    paint_rounded_rect(img, cy_draw, cx, hh, hw, corner, value);
  }

  const double py = sp.center_y(pick);
  const double px = sp.column_x(py, r);
  switch (subclass) {
    case 0:
      break;
    case 1:  // collapsed vertebra: endplate callus band
      glow_capsule(img, py, px - sp.half_width * 1.3, py, px + sp.half_width * 1.3, 0.03 * r,
                   0.30);
      break;
    case 2: {  // narrowed disc: facing endplate sclerosis
      const double gap_y = sp.center_y(pick) + sp.unit / 2.0;
      glow_capsule(img, gap_y - 0.015 * r, px - sp.half_width, gap_y - 0.015 * r,
                   px + sp.half_width, 0.015 * r, 0.25);
      glow_capsule(img, gap_y + 0.015 * r, px - sp.half_width, gap_y + 0.015 * r,
                   px + sp.half_width, 0.015 * r, 0.25);
      break;
    }
    case 3: {  // osteophytes: corner spurs at a disc level
      const double gap_y = py + sp.unit / 2.0;
      glow_disk(img, gap_y, px - sp.half_width, 0.035 * r, 0.30);
      glow_disk(img, gap_y, px + sp.half_width, 0.035 * r, 0.30);
      break;
    }
    case 4:  // implant: vertical rod through the column
      glow_capsule(img, py - 1.2 * sp.unit, px + 0.3 * sp.half_width, py + 1.2 * sp.unit,
                   px + 0.3 * sp.half_width, 0.018 * r, 0.35);
      break;
    case 5:  // sclerotic lesion: bright focus inside a vertebra
      glow_disk(img, py + rng.uniform(-0.3, 0.3) * vert_hh,
                px + rng.uniform(-0.3, 0.3) * sp.half_width, 0.05 * r, 0.35);
      break;
    case 6: {  // bone graft: bridging band across a disc space
      const double gap_y = py + sp.unit / 2.0;
      glow_capsule(img, gap_y, px - sp.half_width, gap_y, px + sp.half_width, 0.020 * r, 0.35);
      break;
    }
    case 7:  // pedicle screws: crossed oblique rods
      glow_capsule(img, py - 0.06 * r, px - 0.10 * r, py + 0.02 * r, px + 0.02 * r, 0.015 * r,
                   0.40);
      glow_capsule(img, py - 0.06 * r, px + 0.10 * r, py + 0.02 * r, px - 0.02 * r, 0.015 * r,
                   0.40);
      break;
    default:
      throw ContractError("toy subclass out of range");
  }

  if (noise_std > 0)
    for (std::size_t i = 0; i < img.values.size(); ++i)
      img.values[i] += static_cast<float>(rng.normal() * noise_std);
  img.clamp_to_range();
  return img;
}

}  // namespace

ImageDataset toy_generate(const ToyConfig& cfg, std::uint64_t seed) {
  if (cfg.class_count != 2 && cfg.class_count != subclass_names().size())
    throw ConfigError("toy_generate: class_count must be 2 or " +
                      std::to_string(subclass_names().size()));
  ImageDataset ds;
  ds.resolution = cfg.resolution;
  ds.class_count = cfg.class_count;
  for (std::size_t i = 0; i < cfg.count; ++i) {
    Rng rng(derive_seed(seed, "toy/" + std::to_string(i)));
    const bool abnormal = rng.bernoulli(cfg.abnormal_fraction);
    const std::size_t subclass =
        abnormal ? 1 + rng.uniform_int(subclass_names().size() - 1) : 0;
    GrayImage img = render_toy(cfg.resolution, subclass, cfg.noise_std, rng);
    const std::size_t class_id =
        cfg.class_count == 2 ? static_cast<std::size_t>(abnormal ? 1 : 0) : subclass;
    ds.push(std::move(img), class_id, abnormal ? 1 : 0);
  }
  ds.validate();
  return ds;
}

double central_band_mean(const GrayImage& img) {
  const std::size_t x0 = static_cast<std::size_t>(0.3 * img.width);
  const std::size_t x1 = static_cast<std::size_t>(0.7 * img.width);
  const std::size_t y0 = static_cast<std::size_t>(0.15 * img.height);
  const std::size_t y1 = static_cast<std::size_t>(0.85 * img.height);
  double acc = 0.0;
  for (std::size_t y = y0; y < y1; ++y)
    for (std::size_t x = x0; x < x1; ++x) acc += img.at(y, x);
  return acc / (static_cast<double>(y1 - y0) * static_cast<double>(x1 - x0));
}

}  // namespace synthlearn
