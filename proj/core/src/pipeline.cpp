#include "synthlearn/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthlearn/csv.hpp"

namespace synthlearn {

namespace fs = std::filesystem;

void ImageDataset::push(GrayImage img, std::size_t class_id, int label) {
  if (img.range != ValueRange::Unit) throw ContractError("dataset images must be unit range");
  if (resolution == 0) resolution = img.height;
  if (img.height != resolution || img.width != resolution)
    throw ContractError("dataset images must be square at the dataset resolution");
  if (class_id >= class_count) throw ContractError("class id out of range");
  images.push_back(std::move(img));
  class_ids.push_back(class_id);
  labels.push_back(label ? 1 : 0);
}

void ImageDataset::validate() const {
  if (images.size() != class_ids.size() || images.size() != labels.size())
    throw ContractError("dataset column lengths differ");
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].height != resolution || images[i].width != resolution)
      throw ContractError("dataset image size mismatch at index " + std::to_string(i));
    if (class_ids[i] >= class_count)
      throw ContractError("dataset class id out of range at index " + std::to_string(i));
  }
}

const std::vector<std::string>& subclass_names() {
  static const std::vector<std::string> names = {
      "no_finding",      "collapsed_vertebra", "narrowed_disc", "osteophyte",
      "implant",         "sclerotic_lesion",   "bone_graft",    "pedicle_screw"};
  return names;
}

void save_dataset(const std::string& dir, const ImageDataset& ds, int bit_depth) {
  ds.validate();
  fs::create_directories(dir);
  CsvWriter csv({"filename", "class_id", "label"});
  char name[32];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::snprintf(name, sizeof name, "img_%06zu.pgm", i);
    write_pgm(ds.images[i], (fs::path(dir) / name).string(), bit_depth);
    csv.row({name, std::to_string(ds.class_ids[i]), std::to_string(ds.labels[i])});
  }
  std::ofstream meta(fs::path(dir) / "dataset.meta");
  meta << "resolution " << ds.resolution << "\n";
  meta << "class_count " << ds.class_count << "\n";
  csv.write((fs::path(dir) / "dataset.csv").string());
}

ImageDataset load_dataset(const std::string& dir) {
  std::ifstream meta(fs::path(dir) / "dataset.meta");
  if (!meta) throw ConfigError("missing dataset.meta in " + dir);
  ImageDataset ds;
  std::string key;
  while (meta >> key) {
    if (key == "resolution")
      meta >> ds.resolution;
    else if (key == "class_count")
      meta >> ds.class_count;
    else
      throw ConfigError("unknown dataset.meta key: " + key);
  }
  CsvTable table = read_csv((fs::path(dir) / "dataset.csv").string());
  const std::size_t fn = table.column_index("filename");
  const std::size_t ci = table.column_index("class_id");
  const std::size_t lb = table.column_index("label");
  for (const auto& row : table.rows) {
    GrayImage img = read_pgm((fs::path(dir) / row[fn]).string());
    ds.push(std::move(img), std::stoull(row[ci]), std::stoi(row[lb]));
  }
  ds.validate();
  return ds;
}

Tensor<float> batch_unit(const ImageDataset& ds, const std::vector<std::size_t>& idx) {
  const std::size_t r = ds.resolution;
  Tensor<float> out({idx.size(), 1, r, r});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= ds.size()) throw ContractError("batch index out of range");
    const GrayImage& img = ds.images[idx[i]];
    std::copy(img.values.begin(), img.values.end(), out.ptr() + i * r * r);
  }
  return out;
}

Tensor<float> batch_signed(const ImageDataset& ds, const std::vector<std::size_t>& idx) {
  Tensor<float> out = batch_unit(ds, idx);
  for (std::size_t i = 0; i < out.count(); ++i) out[i] = out[i] * 2.0f - 1.0f;
  return out;
}

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

GrayImage center_square_crop(const GrayImage& img) {
  const std::size_t side = std::min(img.height, img.width);
  const std::size_t oy = (img.height - side) / 2;
  const std::size_t ox = (img.width - side) / 2;
  GrayImage out(side, side, img.range);
  for (std::size_t y = 0; y < side; ++y)
    for (std::size_t x = 0; x < side; ++x) out.at(y, x) = img.at(oy + y, ox + x);
  return out;
}

GrayImage nearest_resize(const GrayImage& img, std::size_t out_side) {
  if (out_side == 0) throw ContractError("nearest_resize: zero output size");
  GrayImage out(out_side, out_side, img.range);
  const double sy = static_cast<double>(img.height) / static_cast<double>(out_side);
  const double sx = static_cast<double>(img.width) / static_cast<double>(out_side);
  for (std::size_t y = 0; y < out_side; ++y) {
    const std::size_t iy = std::min(img.height - 1,
                                    static_cast<std::size_t>((y + 0.5) * sy));
    for (std::size_t x = 0; x < out_side; ++x) {
      const std::size_t ix = std::min(img.width - 1,
                                      static_cast<std::size_t>((x + 0.5) * sx));
      out.at(y, x) = img.at(iy, ix);
    }
  }
  return out;
}

std::vector<LinearTap> bilinear_taps(std::size_t in_size, std::size_t out_size) {
  if (in_size == 0 || out_size == 0) throw ContractError("bilinear_taps: zero size");
  std::vector<LinearTap> taps(out_size);
  const double scale = static_cast<double>(in_size) / static_cast<double>(out_size);
  for (std::size_t i = 0; i < out_size; ++i) {
    const double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
    double lo = std::floor(src);
    double frac = src - lo;
    if (lo < 0) {
      lo = 0;
      frac = 0.0;
    }
    std::size_t lo_i = static_cast<std::size_t>(lo);
    std::size_t hi_i = lo_i + 1;
    if (hi_i >= in_size) {
      hi_i = in_size - 1;
      if (lo_i >= in_size) lo_i = in_size - 1;
      if (lo_i == hi_i) frac = 0.0;
    }
    taps[i] = {lo_i, hi_i, frac};
  }
  return taps;
}

// ---------------------------------------------------------------------------
// Classifier augmentation
// ---------------------------------------------------------------------------

namespace {

float sample_bilinear_clamped(const GrayImage& img, double y, double x) {
  const double yc = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const double xc = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  const std::size_t y0 = static_cast<std::size_t>(yc);
  const std::size_t x0 = static_cast<std::size_t>(xc);
  const std::size_t y1 = std::min(y0 + 1, img.height - 1);
  const std::size_t x1 = std::min(x0 + 1, img.width - 1);
  const double fy = yc - static_cast<double>(y0);
  const double fx = xc - static_cast<double>(x0);
  const double top = img.at(y0, x0) + fx * (img.at(y0, x1) - img.at(y0, x0));
  const double bot = img.at(y1, x0) + fx * (img.at(y1, x1) - img.at(y1, x0));
  return static_cast<float>(top + fy * (bot - top));
}

}  // namespace

GrayImage classifier_augment(const GrayImage& img, const AugmentConfig& cfg, Rng& rng) {
  GrayImage work = img;

  if (rng.uniform() < cfg.flip_p) {
    for (std::size_t y = 0; y < work.height; ++y)
      for (std::size_t x = 0; x < work.width / 2; ++x)
        std::swap(work.at(y, x), work.at(y, work.width - 1 - x));
  }

  const double deg = rng.uniform(-cfg.max_rotate_deg, cfg.max_rotate_deg);
  if (deg != 0.0) {
    const double rad = deg * M_PI / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    const double cy = (static_cast<double>(work.height) - 1.0) / 2.0;
    const double cx = (static_cast<double>(work.width) - 1.0) / 2.0;
    GrayImage rotated(work.height, work.width, work.range);
    for (std::size_t y = 0; y < work.height; ++y) {
      for (std::size_t x = 0; x < work.width; ++x) {
        const double dy = static_cast<double>(y) - cy;
        const double dx = static_cast<double>(x) - cx;
        rotated.at(y, x) =
            sample_bilinear_clamped(work, cy + c * dy - s * dx, cx + s * dy + c * dx);
      }
    }
    work = std::move(rotated);
  }

  const double scale = rng.uniform(cfg.crop_scale_min, cfg.crop_scale_max);
  const double side_f = std::sqrt(scale) * static_cast<double>(std::min(work.height, work.width));
  const std::size_t side =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(side_f)));
  if (side < std::min(work.height, work.width)) {
    const std::size_t oy = rng.uniform_int(work.height - side + 1);
    const std::size_t ox = rng.uniform_int(work.width - side + 1);
    GrayImage crop(side, side, work.range);
    for (std::size_t y = 0; y < side; ++y)
      for (std::size_t x = 0; x < side; ++x) crop.at(y, x) = work.at(oy + y, ox + x);
    Tensor<float> t({1, 1, side, side});
    std::copy(crop.values.begin(), crop.values.end(), t.ptr());
    Tensor<float> back = bilinear_resize(t, img.height, img.width);
    GrayImage out(img.height, img.width, img.range);
    std::copy(back.ptr(), back.ptr() + back.count(), out.values.begin());
    out.clamp_to_range();
    return out;
  }
  work.clamp_to_range();
  return work;
}

// ---------------------------------------------------------------------------
// Corpus preprocessing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_findings(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';'))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

std::size_t finding_subclass(const std::string& finding) {
  const auto& names = subclass_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == finding) return i;
  throw ConfigError("unknown finding: " + finding);
}

}  // namespace

PreprocessReport preprocess_corpus(const std::string& in_dir, const std::string& out_dir,
                                   const PreprocessConfig& cfg) {
  if (cfg.class_count != 2 && cfg.class_count != subclass_names().size())
    throw ConfigError("preprocess: class_count must be 2 or " +
                      std::to_string(subclass_names().size()));
  CsvTable table = read_csv((fs::path(in_dir) / "labels.csv").string());
  const std::size_t fn = table.column_index("filename");
  const std::size_t fd = table.column_index("findings");

  PreprocessReport report;
  ImageDataset ds;
  ds.resolution = cfg.target_resolution;
  ds.class_count = cfg.class_count;
  for (const auto& row : table.rows) {
    const auto findings = split_findings(row[fd]);
    if (findings.size() > 1) {
      ++report.rejected_multilabel;
      continue;
    }
    GrayImage raw;
    try {
      raw = read_pgm((fs::path(in_dir) / row[fn]).string());
    } catch (const std::exception&) {
      ++report.rejected_unreadable;
      continue;
    }
    if (std::min(raw.height, raw.width) < cfg.min_dimension) {
      ++report.rejected_small;
      continue;
    }
    const std::size_t sub =
        findings.empty() ? 0 : finding_subclass(findings[0]);
    const int label = sub != 0 ? 1 : 0;
    const std::size_t class_id = cfg.class_count == 2 ? static_cast<std::size_t>(label) : sub;
    GrayImage img = nearest_resize(center_square_crop(raw), cfg.target_resolution);
    ds.push(std::move(img), class_id, label);
    ++report.accepted;
  }
  save_dataset(out_dir, ds, cfg.bit_depth);

  CsvWriter rep({"reason", "count"});
  rep.row({"accepted", std::to_string(report.accepted)});
  rep.row({"rejected_small", std::to_string(report.rejected_small)});
  rep.row({"rejected_multilabel", std::to_string(report.rejected_multilabel)});
  rep.row({"rejected_unreadable", std::to_string(report.rejected_unreadable)});
  rep.write((fs::path(out_dir) / "preprocess_report.csv").string());
  return report;
}

}  // namespace synthlearn
