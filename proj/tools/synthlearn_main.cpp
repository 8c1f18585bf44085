// Command-line front end: dataset preparation, GAN and classifier training,
// generation metrics, privacy accounting, the downstream experiment matrix,
// and report assembly. Every command resolves its configuration from profile
// defaults, an optional config file, and explicit flags (in that order),
// then records the resolved values plus input hashes in a run manifest.
#include <CLI11.hpp>

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

#include "synthlearn/accountant.hpp"
#include "synthlearn/checkpoint.hpp"
#include "synthlearn/config.hpp"
#include "synthlearn/csv.hpp"
#include "synthlearn/eval.hpp"
#include "synthlearn/gan.hpp"
#include "synthlearn/manifest.hpp"
#include "synthlearn/metrics.hpp"
#include "synthlearn/pipeline.hpp"
#include "synthlearn/plot.hpp"
#include "synthlearn/report.hpp"
#include "synthlearn/toydata.hpp"

namespace fs = std::filesystem;
using namespace synthlearn;

namespace {

// args after the binary name, recorded in every run manifest for replay
std::vector<std::string> g_invocation;

// ---------------------------------------------------------------------------
// Configuration plumbing
// ---------------------------------------------------------------------------

// CLI options that override config-file keys. Values stay strings; the
// Config getters do the typed parsing so flag and file inputs share one
// validation path.
struct Overlay {
  struct Entry {
    CLI::Option* opt = nullptr;
    std::string section, key, value;
  };
  std::deque<Entry> entries;

  void add(CLI::App& app, const std::string& flag, const std::string& section,
           const std::string& key, const std::string& help) {
    entries.push_back({nullptr, section, key, {}});
    Entry& e = entries.back();
    e.opt = app.add_option(flag, e.value, help);
  }
  void apply(Config& cfg) const {
    for (const auto& e : entries)
      if (e.opt->count() > 0) cfg.set(e.section, e.key, e.value);
  }
};

struct GlobalFlags {
  std::string config_file;
  std::string profile;
  std::uint64_t seed = 0;
  CLI::Option* profile_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "config file (sectioned key = value)");
    profile_opt = app.add_option("--profile", profile, "scale preset: desk or paper");
    seed_opt = app.add_option("--seed", seed, "global seed; component streams derive from it");
  }
};

struct CommandCtx {
  Config cfg;       // file + flag overlays
  Config resolved;  // effective values, written by Reader
  std::string profile;
  std::uint64_t seed = 0;

  bool desk() const { return profile == "desk"; }
};

CommandCtx make_ctx(const GlobalFlags& g, const Overlay& overlay) {
  CommandCtx ctx;
  ctx.cfg = g.config_file.empty() ? Config{} : Config::parse_file(g.config_file);
  overlay.apply(ctx.cfg);

  ctx.profile = g.profile_opt->count() ? g.profile
                                       : ctx.cfg.get_string("run", "profile", "desk");
  if (ctx.profile != "desk" && ctx.profile != "paper")
    throw ConfigError("unknown profile '" + ctx.profile + "' (expected desk or paper)");
  ctx.seed = g.seed_opt->count()
                 ? g.seed
                 : static_cast<std::uint64_t>(ctx.cfg.get_int("run", "seed", 0));
  const std::string mode = ctx.cfg.get_string("run", "numeric_mode", "f32");
  if (mode != "f32")
    throw ConfigError("run.numeric_mode: only f32 training math is built; got '" + mode + "'");

  ctx.resolved.set("run", "profile", ctx.profile);
  ctx.resolved.set("run", "seed", std::to_string(ctx.seed));
  ctx.resolved.set("run", "numeric_mode", mode);
  return ctx;
}

// Reads one section with profile-dependent fallbacks and mirrors every value
// it touched into ctx.resolved, so the manifest shows the effective config.
class Reader {
public:
  Reader(CommandCtx& ctx, std::string section) : ctx_(ctx), section_(std::move(section)) {}

  std::string str(const std::string& key, const std::string& fallback) {
    std::string v = ctx_.cfg.get_string(section_, key, fallback);
    ctx_.resolved.set(section_, key, v);
    return v;
  }
  double num(const std::string& key, double fallback) {
    double v = ctx_.cfg.get_double(section_, key, fallback);
    ctx_.resolved.set(section_, key, format_double(v, 17));
    return v;
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    std::int64_t v = ctx_.cfg.get_int(section_, key, fallback);
    ctx_.resolved.set(section_, key, std::to_string(v));
    return v;
  }
  std::size_t size(const std::string& key, std::size_t fallback) {
    std::int64_t v = integer(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError(section_ + "." + key + ": must be nonnegative");
    return static_cast<std::size_t>(v);
  }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) {
    std::int64_t v = integer(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw ConfigError(section_ + "." + key + ": must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  bool flag(const std::string& key, bool fallback) {
    bool v = ctx_.cfg.get_bool(section_, key, fallback);
    ctx_.resolved.set(section_, key, v ? "true" : "false");
    return v;
  }
  std::vector<std::size_t> sizes(const std::string& key,
                                 const std::vector<std::size_t>& fallback) {
    std::vector<std::size_t> v = ctx_.cfg.get_size_list(section_, key, fallback);
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i)
      joined += (i ? "," : "") + std::to_string(v[i]);
    ctx_.resolved.set(section_, key, joined);
    return v;
  }

private:
  CommandCtx& ctx_;
  std::string section_;
};

std::string resolve_out(const std::string& path) {
  const char* root = std::getenv("SYNTHLEARN_OUT_ROOT");
  if (root && *root && fs::path(path).is_relative()) return (fs::path(root) / path).string();
  return path;
}

void finish_run(const CommandCtx& ctx, const std::string& dir, const std::string& command,
                const std::vector<std::pair<std::string, std::string>>& inputs,
                std::vector<std::string> outputs) {
  ctx.cfg.require_all_consumed();
  RunManifest m;
  m.command = command;
  m.profile = ctx.profile;
  m.seed = ctx.seed;
  m.config_text = ctx.resolved.render();
  m.argv = g_invocation;
  m.inputs = inputs;
  m.outputs = std::move(outputs);
  write_manifest((fs::path(dir) / "manifest.txt").string(), m);
}

std::pair<std::string, std::string> hashed(const std::string& path) {
  return {path, file_hash_hex(path)};
}

std::vector<std::pair<std::string, std::string>> dataset_inputs(const std::string& dir) {
  return {hashed((fs::path(dir) / "dataset.meta").string()),
          hashed((fs::path(dir) / "dataset.csv").string())};
}

// ---------------------------------------------------------------------------
// Section readers shared between commands
// ---------------------------------------------------------------------------

struct GanSettings {
  GanTrainConfig cfg;
  std::string arm;  // applied dp ablation arm, empty if none
};

GanSettings read_gan_section(CommandCtx& ctx, bool have_domain) {
  Reader g(ctx, "gan");
  const bool desk = ctx.desk();
  GanSettings s;

  s.arm = g.str("dp_arm", "");
  DpConfig arm_dp;
  std::size_t arm_batch = 0;
  if (!s.arm.empty()) {
    const DpArm& a = dp_arm(s.arm);
    arm_dp = a.dp;
    arm_batch = a.batch_override;
  }

  GanTrainConfig& c = s.cfg;
  c.resolution = g.size("resolution", desk ? 64 : 256);
  c.class_count = g.size("class_count", 2);
  c.batch = g.size("batch", arm_batch ? arm_batch : (desk ? std::size_t(16) : std::size_t(32)));
  c.budget_images = g.u64("budget_images", desk ? 100000 : 4200000);
  c.checkpoint_interval = g.u64("checkpoint_interval", desk ? 10000 : 200000);
  c.gamma = g.num("gamma", have_domain ? 0.01 : 0.0);
  c.ada_enabled = g.flag("ada", true);
  c.ada.target = g.num("ada_target", 0.6);
  c.dp.enabled = g.flag("dp", s.arm.empty() ? false : arm_dp.enabled);
  c.dp.clip_norm = g.num("dp_clip", s.arm.empty() ? 1.5 : arm_dp.clip_norm);
  c.dp.noise_std = g.num("dp_noise", s.arm.empty() ? 0.2 : arm_dp.noise_std);
  c.dp.microbatch_size = g.size("dp_microbatch", s.arm.empty() ? 1 : arm_dp.microbatch_size);
  c.opt_g.lr = g.num("lr_g", 2e-4);
  c.opt_d.lr = g.num("lr_d", 2e-4);
  c.latent_dim = g.size("latent_dim", 64);
  c.gen_widths = g.sizes("gen_widths", {});
  c.disc_widths = g.sizes("disc_widths", {});
  c.log_interval = g.u64("log_interval", c.checkpoint_interval);
  return s;
}

ClassifierTrainConfig read_classifier_section(CommandCtx& ctx) {
  Reader r(ctx, "classifier");
  const bool desk = ctx.desk();
  ClassifierTrainConfig c;
  c.resolution = r.size("resolution", desk ? 64 : 224);
  c.widths = r.sizes("widths", {16, 32, 64});
  c.epochs = r.size("epochs", 30);
  c.batch = r.size("batch", 32);
  c.opt.lr = r.num("lr", 1e-3);
  c.augment_enabled = r.flag("augment", true);
  c.augment.flip_p = r.num("flip_p", 0.3);
  c.augment.max_rotate_deg = r.num("max_rotate_deg", 5.0);
  c.augment.crop_scale_min = r.num("crop_scale_min", 0.8);
  c.augment.crop_scale_max = r.num("crop_scale_max", 1.0);
  return c;
}

void write_history_csv(const std::string& path, const std::vector<EpochStats>& history) {
  CsvWriter w({"epoch", "train_loss", "holdout_auc"});
  for (const auto& h : history)
    w.row({std::to_string(h.epoch), format_double(h.train_loss),
           std::isnan(h.holdout_auc) ? "" : format_double(h.holdout_auc)});
  w.write(path);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

void cmd_toygen(CommandCtx& ctx, const std::string& out) {
  Reader r(ctx, "toygen");
  ToyConfig tc;
  tc.count = r.size("count", 2000);
  tc.resolution = r.size("resolution", ctx.desk() ? 64 : 256);
  tc.class_count = r.size("class_count", 2);
  tc.abnormal_fraction = r.num("abnormal_fraction", 0.39);
  tc.noise_std = r.num("noise_std", 0.02);

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  ImageDataset ds = toy_generate(tc, ctx.seed);
  save_dataset(out, ds);
  finish_run(ctx, out, "toygen", {}, {out});
  std::cout << "wrote " << ds.size() << " toy images to " << out << "\n";
}

void cmd_preprocess(CommandCtx& ctx, const std::string& in, const std::string& out) {
  Reader r(ctx, "preprocess");
  PreprocessConfig pc;
  pc.target_resolution = r.size("target_resolution", ctx.desk() ? 64 : 256);
  pc.min_dimension = r.size("min_dimension", 128);
  pc.class_count = r.size("class_count", 2);
  pc.bit_depth = static_cast<int>(r.integer("bit_depth", 16));

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  PreprocessReport rep = preprocess_corpus(in, out, pc);
  finish_run(ctx, out, "preprocess", {hashed((fs::path(in) / "labels.csv").string())}, {out});
  std::cout << "accepted " << rep.accepted << ", rejected " << rep.rejected_small
            << " small + " << rep.rejected_multilabel << " multilabel + "
            << rep.rejected_unreadable << " unreadable -> " << out << "\n";
}

void cmd_train_gan(CommandCtx& ctx, const std::string& data_dir, const std::string& out,
                   const std::string& domain_ckpt) {
  GanSettings s = read_gan_section(ctx, !domain_ckpt.empty());

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  ImageDataset data = load_dataset(data_dir);
  auto inputs = dataset_inputs(data_dir);

  Model<float> domain;
  const Model<float>* domain_ptr = nullptr;
  if (!domain_ckpt.empty()) {
    LoadedCheckpoint ck = load_checkpoint(domain_ckpt);
    if (ck.model.spec.kind != ModelKind::Classifier)
      throw ConfigError("--domain-classifier: " + domain_ckpt + " is not a classifier");
    domain = std::move(ck.model);
    s.cfg.normalize.resolution = domain.spec.resolution;
    domain_ptr = &domain;
    inputs.push_back(hashed(domain_ckpt));
  }

  CsvWriter log({"images_shown", "d_loss", "g_loss", "ada_p"});
  auto progress = [&](const GanProgress& p) {
    log.row({std::to_string(p.images_shown), format_double(p.d_loss), format_double(p.g_loss),
             format_double(p.ada_p)});
    std::cout << "  " << p.images_shown << "/" << s.cfg.budget_images << " d=" << p.d_loss
              << " g=" << p.g_loss << " p=" << p.ada_p << "\n";
  };
  GanTrainResult res = train_gan(s.cfg, data, domain_ptr, out, ctx.seed, progress);
  log.write((fs::path(out) / "train_log.csv").string());

  std::vector<std::string> outputs = res.checkpoint_files;
  outputs.push_back((fs::path(out) / "train_log.csv").string());
  finish_run(ctx, out, "train-gan", inputs, outputs);
  std::cout << "trained " << res.images_shown << " images in " << res.steps << " steps, "
            << res.checkpoint_files.size() << " checkpoints -> " << out << "\n";
}

void cmd_train_classifier(CommandCtx& ctx, const std::string& data_dir, const std::string& out,
                          const std::string& holdout_dir, const std::string& test_dir) {
  ClassifierTrainConfig cc = read_classifier_section(ctx);
  Reader r(ctx, "classifier");
  const double holdout_fraction = r.num("holdout_fraction", 0.0);
  if (holdout_fraction < 0 || holdout_fraction >= 1)
    throw ConfigError("classifier.holdout_fraction must lie in [0, 1)");

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  ImageDataset train = load_dataset(data_dir);
  auto inputs = dataset_inputs(data_dir);

  ImageDataset holdout;
  bool have_holdout = false;
  if (!holdout_dir.empty()) {
    holdout = load_dataset(holdout_dir);
    auto hi = dataset_inputs(holdout_dir);
    inputs.insert(inputs.end(), hi.begin(), hi.end());
    have_holdout = true;
  } else if (holdout_fraction > 0) {
    // deterministic tail split after a seeded shuffle
    Rng rng(derive_seed(ctx.seed, "holdout-split"));
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);
    const std::size_t n_hold = static_cast<std::size_t>(
        holdout_fraction * static_cast<double>(train.size()));
    if (n_hold == 0 || n_hold == train.size())
      throw ConfigError("holdout fraction leaves an empty split");
    ImageDataset rest;
    rest.resolution = holdout.resolution = train.resolution;
    rest.class_count = holdout.class_count = train.class_count;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const std::size_t idx = order[i];
      ImageDataset& dst = i < n_hold ? holdout : rest;
      dst.push(train.images[idx], train.class_ids[idx], train.labels[idx]);
    }
    train = std::move(rest);
    have_holdout = true;
  }

  ClassifierTrainResult res =
      train_classifier(cc, train, ctx.seed, have_holdout ? &holdout : nullptr);

  CheckpointMeta meta;
  meta.step = static_cast<std::int64_t>(cc.epochs);
  meta.images_shown = static_cast<std::uint64_t>(cc.epochs) * train.size();
  const std::string final_path = (fs::path(out) / "classifier.ckpt").string();
  save_checkpoint(final_path, res.model, meta);
  std::vector<std::string> outputs{final_path};

  if (have_holdout && res.best_epoch > 0) {
    Model<float> best = build_model<float>(res.model.spec, 0);
    best.net.params() = res.best_params;
    CheckpointMeta bm;
    bm.step = static_cast<std::int64_t>(res.best_epoch);
    bm.images_shown = static_cast<std::uint64_t>(res.best_epoch) * train.size();
    const std::string best_path = (fs::path(out) / "classifier_best.ckpt").string();
    save_checkpoint(best_path, best, bm);
    outputs.push_back(best_path);
  }

  const std::string hist_path = (fs::path(out) / "history.csv").string();
  write_history_csv(hist_path, res.history);
  outputs.push_back(hist_path);

  if (!test_dir.empty()) {
    ImageDataset test = load_dataset(test_dir);
    auto ti = dataset_inputs(test_dir);
    inputs.insert(inputs.end(), ti.begin(), ti.end());
    const double auc = evaluate_auc(res.model, test, res.normalize);
    std::size_t pos = 0;
    for (int l : test.labels) pos += l ? 1 : 0;
    CsvWriter w({"auc", "n_pos", "n_neg"});
    w.row({format_double(auc), std::to_string(pos), std::to_string(test.size() - pos)});
    const std::string eval_path = (fs::path(out) / "eval.csv").string();
    w.write(eval_path);
    outputs.push_back(eval_path);
    std::cout << "test auc " << auc << " on " << test.size() << " images\n";
  }

  finish_run(ctx, out, "train-classifier", inputs, outputs);
  std::cout << "trained " << cc.epochs << " epochs on " << train.size() << " images -> " << out
            << "\n";
}

void cmd_generate(CommandCtx& ctx, const std::string& ckpt, const std::string& out) {
  Reader r(ctx, "generate");
  const std::size_t count = r.size("count", 16);
  const std::int64_t class_id = r.integer("class_id", -1);  // -1: balanced round robin
  const std::size_t columns = r.size("montage_columns", 4);

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  LoadedCheckpoint ck = load_checkpoint(ckpt);
  if (ck.model.spec.kind != ModelKind::Generator)
    throw ConfigError("--checkpoint: " + ckpt + " is not a generator checkpoint");
  const std::size_t k = ck.model.spec.class_count;
  if (class_id >= static_cast<std::int64_t>(k))
    throw ConfigError("generate.class_id out of range for " + std::to_string(k) + " classes");

  std::vector<std::size_t> class_ids(count);
  for (std::size_t i = 0; i < count; ++i)
    class_ids[i] = class_id < 0 ? i % k : static_cast<std::size_t>(class_id);
  Rng rng(derive_seed(ctx.seed, "generate"));
  Tensor<float> images = generate_images(ck.model, class_ids, rng);

  const std::size_t res = ck.model.spec.resolution;
  fs::create_directories(fs::path(out) / "samples");
  std::vector<GrayImage> grid;
  std::vector<std::string> outputs;
  CsvWriter index({"file", "class_id"});
  for (std::size_t i = 0; i < count; ++i) {
    GrayImage img(res, res, ValueRange::Unit);
    std::copy(images.ptr() + i * res * res, images.ptr() + (i + 1) * res * res,
              img.values.begin());
    img.clamp_to_range();
    char name[32];
    std::snprintf(name, sizeof name, "sample_%04zu.pgm", i);
    const std::string path = (fs::path(out) / "samples" / name).string();
    write_pgm(img, path, 8);
    index.row({std::string("samples/") + name, std::to_string(class_ids[i])});
    outputs.push_back(path);
    grid.push_back(std::move(img));
  }
  const std::string montage_path = (fs::path(out) / "samples.pgm").string();
  write_pgm(montage(grid, columns), montage_path, 8);
  outputs.push_back(montage_path);
  const std::string index_path = (fs::path(out) / "samples.csv").string();
  index.write(index_path);
  outputs.push_back(index_path);

  finish_run(ctx, out, "generate", {hashed(ckpt)}, outputs);
  std::cout << "wrote " << count << " samples + montage -> " << out << "\n";
}

void cmd_metrics(CommandCtx& ctx, const std::string& ckpt_dir, const std::string& data_dir,
                 const std::string& extractor_path, const std::string& out) {
  Reader r(ctx, "metrics");
  const std::size_t samples = r.size("samples", ctx.desk() ? 500 : 10000);
  const std::size_t knn_k = r.size("knn_k", 3);
  const std::string variant = r.str("variant", "default");

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  ImageDataset real = load_dataset(data_dir);
  LoadedCheckpoint ex = load_checkpoint(extractor_path);
  if (ex.model.spec.kind != ModelKind::Classifier)
    throw ConfigError("--extractor: " + extractor_path + " is not a classifier checkpoint");
  NormalizeSpec norm;
  norm.resolution = ex.model.spec.resolution;

  std::vector<CheckpointEval> evals =
      evaluate_checkpoints(ckpt_dir, real, ex.model, norm, samples, ctx.seed, knn_k);

  CsvWriter w({"file", "images_shown", "fid", "precision", "recall", "variant", "seed"});
  for (const auto& e : evals)
    w.row({e.file, std::to_string(e.images_shown), format_double(e.fid),
           format_double(e.precision), format_double(e.recall), variant,
           std::to_string(ctx.seed)});
  const std::string csv_path = (fs::path(out) / "metrics.csv").string();
  w.write(csv_path);

  auto inputs = dataset_inputs(data_dir);
  inputs.push_back(hashed(extractor_path));
  finish_run(ctx, out, "metrics", inputs, {csv_path});
  for (const auto& e : evals)
    std::cout << e.file << " @" << e.images_shown << " fid=" << e.fid
              << " precision=" << e.precision << " recall=" << e.recall << "\n";
}

void cmd_accountant(CommandCtx& ctx, const std::string& out_file) {
  Reader r(ctx, "accountant");
  const std::string grid_text = r.str("noise_grid", "");
  const double clip = r.num("clip", 1.5);
  const std::string q_text = r.str("q", "");
  const std::string delta_text = r.str("delta", "");
  const std::int64_t dataset_size = r.integer("dataset_size", 0);
  const std::int64_t batch = r.integer("batch", 1);
  const std::uint64_t steps_flag = r.u64("steps", 0);
  const std::uint64_t budget = r.u64("budget_images", ctx.desk() ? 100000 : 4200000);
  const std::uint64_t interval = r.u64("checkpoint_interval", ctx.desk() ? 10000 : 200000);
  const double noise_std = r.num("noise_std", 0.2);
  ctx.cfg.require_all_consumed();

  if (batch <= 0) throw ConfigError("accountant.batch must be positive");
  double delta;
  if (!delta_text.empty())
    delta = parse_delta(delta_text);
  else if (dataset_size > 0)
    delta = delta_default(static_cast<std::uint64_t>(dataset_size));
  else
    throw ConfigError("accountant: need --delta or --dataset-size");

  double q;
  if (!q_text.empty())
    q = parse_double_strict(q_text, "accountant.q");
  else if (dataset_size > 0)
    q = std::min(1.0, static_cast<double>(batch) / static_cast<double>(dataset_size));
  else
    throw ConfigError("accountant: need --q or --dataset-size");
  if (q <= 0 || q > 1) throw ConfigError("accountant.q must lie in (0, 1]");

  const std::uint64_t steps =
      steps_flag ? steps_flag : budget / static_cast<std::uint64_t>(batch);

  const fs::path parent = fs::path(out_file).parent_path();
  if (!parent.empty()) fs::create_directories(parent);

  RunManifest m;
  m.command = "accountant";
  m.profile = ctx.profile;
  m.seed = ctx.seed;
  m.argv = g_invocation;

  if (!grid_text.empty()) {
    // noise sweep mode
    std::vector<double> grid = expand_grid(grid_text);
    std::vector<NoiseSweepPoint> sweep = noise_selection_sweep(grid, clip, q, steps, delta);
    CsvWriter w({"noise_std", "noise_multiplier", "epsilon", "alpha_star", "selected"});
    for (const auto& p : sweep)
      w.row({format_double(p.noise_std), format_double(p.sigma), format_double(p.epsilon),
             format_double(p.order), p.selected ? "1" : "0"});
    w.write(out_file);
    for (const auto& p : sweep)
      if (p.selected)
        std::cout << "selected noise_std " << p.noise_std << " (sigma " << p.sigma
                  << ", epsilon " << p.epsilon << ", alpha " << p.order << ")\n";
  } else {
    // spend curve mode
    if (dataset_size <= 0)
      throw ConfigError("accountant curve mode: need --dataset-size (with --batch)");
    const double sigma = noise_multiplier(noise_std, clip);
    std::vector<PrivacyCurvePoint> curve =
        privacy_curve(budget, interval, static_cast<std::size_t>(batch),
                      static_cast<std::size_t>(dataset_size), sigma, delta);
    CsvWriter w({"images_shown", "epsilon", "alpha_star"});
    for (const auto& p : curve)
      w.row({std::to_string(p.images_shown), format_double(p.epsilon),
             format_double(p.order)});
    w.write(out_file);
    std::cout << "epsilon at " << curve.back().images_shown << " images: "
              << curve.back().epsilon << " (delta " << delta << ", sigma " << sigma << ")\n";
  }

  m.config_text = ctx.resolved.render();
  m.outputs = {out_file};
  write_manifest(out_file + ".manifest", m);
}

void cmd_matrix(CommandCtx& ctx, const std::string& data_dir, const std::string& test_dir,
                const std::string& baseline_ckpt, const std::string& domain_ckpt,
                const std::string& out) {
  ClassifierTrainConfig cc = read_classifier_section(ctx);
  Reader r(ctx, "matrix");
  const std::string arms_text = r.str("arms", "");
  const std::string seeds_text = r.str("seeds", "");

  std::vector<std::uint64_t> seeds;
  if (seeds_text.empty()) {
    seeds.push_back(ctx.seed);
  } else {
    for (double v : expand_grid(seeds_text)) seeds.push_back(static_cast<std::uint64_t>(v));
  }

  std::vector<ExperimentArm> arms = default_experiment_arms();
  if (!arms_text.empty()) {
    std::set<std::string> want;
    std::string cur;
    for (char c : arms_text + ",") {
      if (c == ',') {
        if (!cur.empty()) want.insert(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    std::vector<ExperimentArm> filtered;
    for (const auto& arm : arms)
      if (want.erase(arm.name)) filtered.push_back(arm);
    if (!want.empty())
      throw ConfigError("matrix.arms: unknown arm '" + *want.begin() + "'");
    arms = std::move(filtered);
  }

  std::map<std::string, std::string> checkpoints;
  if (!baseline_ckpt.empty()) checkpoints["baseline"] = baseline_ckpt;
  if (!domain_ckpt.empty()) checkpoints["domain"] = domain_ckpt;

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  ImageDataset real_train = load_dataset(data_dir);
  ImageDataset test = load_dataset(test_dir);
  auto inputs = dataset_inputs(data_dir);
  auto ti = dataset_inputs(test_dir);
  inputs.insert(inputs.end(), ti.begin(), ti.end());
  for (const auto& [variant, path] : checkpoints) inputs.push_back(hashed(path));

  MatrixResult res = run_matrix(cc, arms, checkpoints, real_train, test, seeds);

  CsvWriter w({"arm", "seed", "auc", "n_real", "n_synth", "gan_variant"});
  for (const auto& row : res.rows)
    w.row({row.arm, std::to_string(row.seed), format_double(row.auc),
           std::to_string(row.n_real), std::to_string(row.n_synth), row.gan_variant});
  const std::string rows_path = (fs::path(out) / "matrix.csv").string();
  w.write(rows_path);

  CsvWriter s({"arm", "median_auc"});
  for (const auto& row : res.summary) s.row({row.arm, format_double(row.median_auc)});
  const std::string summary_path = (fs::path(out) / "matrix_summary.csv").string();
  s.write(summary_path);

  finish_run(ctx, out, "matrix", inputs, {rows_path, summary_path});
  for (const auto& row : res.summary)
    std::cout << row.arm << " median auc " << row.median_auc << "\n";
}

void cmd_ablation(CommandCtx& ctx, const std::string& data_dir, const std::string& out,
                  const std::string& extractor_path, bool paper_arms) {
  GanSettings base = read_gan_section(ctx, false);
  if (!base.arm.empty())
    throw ConfigError("ablation: gan.dp_arm conflicts with the per-arm plan");
  Reader r(ctx, "ablation");
  std::string arms_text = r.str("arms", "");
  const std::size_t samples = r.size("samples", ctx.desk() ? 500 : 10000);
  const std::size_t knn_k = r.size("knn_k", 3);
  const std::size_t grid_count = r.size("sample_grid", 16);

  std::vector<std::string> arm_names;
  if (paper_arms) {
    if (!arms_text.empty()) throw ConfigError("ablation: --paper-arms conflicts with arms=");
    arm_names = dp_study_arm_names();
  } else if (!arms_text.empty()) {
    std::string cur;
    for (char c : arms_text + ",") {
      if (c == ',') {
        if (!cur.empty()) arm_names.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
  } else {
    arm_names.push_back("baseline");
    for (const auto& n : dp_study_arm_names()) arm_names.push_back(n);
  }

  ctx.cfg.require_all_consumed();  // fail on typos before any work starts
  RunLock lock(out);
  ImageDataset data = load_dataset(data_dir);
  auto inputs = dataset_inputs(data_dir);

  Model<float> extractor;
  NormalizeSpec norm;
  bool have_extractor = false;
  if (!extractor_path.empty()) {
    LoadedCheckpoint ck = load_checkpoint(extractor_path);
    if (ck.model.spec.kind != ModelKind::Classifier)
      throw ConfigError("--extractor: " + extractor_path + " is not a classifier checkpoint");
    extractor = std::move(ck.model);
    norm.resolution = extractor.spec.resolution;
    inputs.push_back(hashed(extractor_path));
    have_extractor = true;
  }

  CsvWriter w({"arm", "status", "clip_norm", "noise_std", "microbatch", "batch",
               "eval_images_shown", "fid", "precision", "recall"});
  std::vector<std::string> outputs;
  for (const auto& name : arm_names) {
    const DpArm& arm = dp_arm(name);  // unknown arm -> error before any training
    GanTrainConfig cfg = base.cfg;
    cfg.dp = arm.dp;
    if (arm.batch_override) cfg.batch = arm.batch_override;
    const std::string arm_dir = (fs::path(out) / name).string();
    std::string status = "ok";
    std::string eval_images, fid_s, prec_s, rec_s;
    try {
      fs::create_directories(arm_dir);
      GanTrainResult res = train_gan(cfg, data, nullptr, arm_dir, ctx.seed);
      outputs.insert(outputs.end(), res.checkpoint_files.begin(), res.checkpoint_files.end());

      std::vector<std::size_t> ids(grid_count);
      for (std::size_t i = 0; i < grid_count; ++i) ids[i] = i % cfg.class_count;
      Rng rng(derive_seed(ctx.seed, "ablation-samples/" + name));
      Tensor<float> images = generate_images(res.generator, ids, rng);
      std::vector<GrayImage> grid;
      for (std::size_t i = 0; i < grid_count; ++i) {
        GrayImage img(cfg.resolution, cfg.resolution, ValueRange::Unit);
        std::copy(images.ptr() + i * cfg.resolution * cfg.resolution,
                  images.ptr() + (i + 1) * cfg.resolution * cfg.resolution,
                  img.values.begin());
        img.clamp_to_range();
        grid.push_back(std::move(img));
      }
      const std::string montage_path = (fs::path(arm_dir) / "samples.pgm").string();
      write_pgm(montage(grid, 4), montage_path, 8);
      outputs.push_back(montage_path);

      if (have_extractor) {
        // arms share the budget, so the earliest checkpoint is the common
        // comparison point
        std::vector<CheckpointEval> evals = evaluate_checkpoints(
            arm_dir, data, extractor, norm, samples, ctx.seed, knn_k);
        const CheckpointEval& e = evals.front();
        eval_images = std::to_string(e.images_shown);
        fid_s = format_double(e.fid);
        prec_s = format_double(e.precision);
        rec_s = format_double(e.recall);
      }
    } catch (const std::exception& ex) {
      status = std::string("failed: ") + ex.what();
    }
    w.row({name, status, format_double(arm.dp.clip_norm), format_double(arm.dp.noise_std),
           std::to_string(arm.dp.microbatch_size),
           std::to_string(arm.batch_override ? arm.batch_override : base.cfg.batch),
           eval_images, fid_s, prec_s, rec_s});
    std::cout << name << ": " << status << "\n";
  }
  const std::string csv_path = (fs::path(out) / "ablation.csv").string();
  w.write(csv_path);
  outputs.push_back(csv_path);
  finish_run(ctx, out, "ablation", inputs, outputs);
}

// Report emitters: reshape stored CSVs into the published table and figure
// layouts. Nothing here recomputes a metric.
void cmd_report(CommandCtx& ctx, const std::vector<std::string>& run_dirs,
                const std::string& kind, const std::string& out) {
  Reader r(ctx, "report");
  (void)r;
  ctx.cfg.require_all_consumed();

  auto require_file = [](const std::string& dir, const std::string& name) {
    const std::string p = (fs::path(dir) / name).string();
    if (!fs::exists(p)) throw ConfigError("report: missing input " + p);
    return p;
  };

  if (kind == "run") {
    if (run_dirs.size() != 1) throw ConfigError("report kind 'run' takes exactly one --run-dir");
    std::vector<std::string> written = write_run_report(run_dirs[0]);
    for (const auto& p : written) std::cout << "wrote " << p << "\n";
    return;
  }

  fs::create_directories(out);
  std::vector<std::string> written;

  if (kind == "table1") {
    CsvTable t = read_csv(require_file(run_dirs.at(0), "matrix_summary.csv"));
    CsvWriter w({"training_source", "test_auc"});
    const std::size_t arm = t.column_index("arm"), med = t.column_index("median_auc");
    for (const auto& row : t.rows) w.row({row[arm], row[med]});
    const std::string p = (fs::path(out) / "table1.csv").string();
    w.write(p);
    written.push_back(p);
  } else if (kind == "table2") {
    CsvWriter w({"variant", "fid", "precision", "recall"});
    for (const auto& dir : run_dirs) {
      CsvTable t = read_csv(require_file(dir, "metrics.csv"));
      if (t.rows.empty()) throw ConfigError("report: empty metrics.csv in " + dir);
      const std::size_t img = t.column_index("images_shown");
      std::size_t last = 0;
      for (std::size_t i = 1; i < t.rows.size(); ++i)
        if (std::stoull(t.rows[i][img]) > std::stoull(t.rows[last][img])) last = i;
      w.row({t.rows[last][t.column_index("variant")], t.rows[last][t.column_index("fid")],
             t.rows[last][t.column_index("precision")],
             t.rows[last][t.column_index("recall")]});
    }
    const std::string p = (fs::path(out) / "table2.csv").string();
    w.write(p);
    written.push_back(p);
  } else if (kind == "fig1") {
    CsvTable t = read_csv(require_file(run_dirs.at(0), "noise_sweep.csv"));
    const std::size_t ns = t.column_index("noise_std"), ep = t.column_index("epsilon");
    const std::size_t sel = t.column_index("selected");
    PlotSpec spec;
    spec.title = "Privacy cost vs gradient noise";
    spec.xlabel = "noise std";
    spec.ylabel = "epsilon";
    spec.log_y = true;
    PlotSeries series{"epsilon", {}, {}};
    for (const auto& row : t.rows) {
      series.x.push_back(std::strtod(row[ns].c_str(), nullptr));
      series.y.push_back(std::strtod(row[ep].c_str(), nullptr));
      if (row[sel] == "1") spec.markers.emplace_back(series.x.back(), series.y.back());
    }
    spec.series.push_back(std::move(series));
    const std::string svg = (fs::path(out) / "fig1.svg").string();
    write_svg_plot(svg, spec);
    written.push_back(svg);
    const std::string csv = (fs::path(out) / "fig1.csv").string();
    fs::copy_file(require_file(run_dirs.at(0), "noise_sweep.csv"), csv,
                  fs::copy_options::overwrite_existing);
    written.push_back(csv);
  } else if (kind == "fig2") {
    CsvWriter w({"images_shown", "fid", "precision", "recall", "variant", "seed"});
    std::map<std::string, PlotSeries> fid_series, prec_series, rec_series;
    for (const auto& dir : run_dirs) {
      CsvTable t = read_csv(require_file(dir, "metrics.csv"));
      const std::size_t img = t.column_index("images_shown"), fid = t.column_index("fid");
      const std::size_t pr = t.column_index("precision"), rc = t.column_index("recall");
      const std::size_t va = t.column_index("variant"), se = t.column_index("seed");
      for (const auto& row : t.rows) {
        w.row({row[img], row[fid], row[pr], row[rc], row[va], row[se]});
        const double x = std::strtod(row[img].c_str(), nullptr);
        auto& fs_ = fid_series[row[va]];
        fs_.label = row[va];
        fs_.x.push_back(x);
        fs_.y.push_back(std::strtod(row[fid].c_str(), nullptr));
        auto& ps = prec_series[row[va]];
        ps.label = row[va];
        ps.x.push_back(x);
        ps.y.push_back(std::strtod(row[pr].c_str(), nullptr));
        auto& rs = rec_series[row[va]];
        rs.label = row[va];
        rs.x.push_back(x);
        rs.y.push_back(std::strtod(row[rc].c_str(), nullptr));
      }
    }
    const std::string csv = (fs::path(out) / "fig2.csv").string();
    w.write(csv);
    written.push_back(csv);
    struct Panel {
      const char* name;
      const char* ylabel;
      std::map<std::string, PlotSeries>* series;
    } panels[] = {{"fig2_fid.svg", "FID", &fid_series},
                  {"fig2_precision.svg", "precision", &prec_series},
                  {"fig2_recall.svg", "recall", &rec_series}};
    for (const auto& panel : panels) {
      PlotSpec spec;
      spec.title = std::string("Generation quality: ") + panel.ylabel;
      spec.xlabel = "images shown";
      spec.ylabel = panel.ylabel;
      for (auto& [name, series] : *panel.series) spec.series.push_back(series);
      const std::string p = (fs::path(out) / panel.name).string();
      write_svg_plot(p, spec);
      written.push_back(p);
    }
  } else if (kind == "fig3") {
    std::vector<GrayImage> rows;
    for (const auto& dir : run_dirs) rows.push_back(read_pgm(require_file(dir, "samples.pgm")));
    for (const auto& img : rows)
      if (img.width != rows[0].width)
        throw ConfigError("report fig3: sample grids differ in width");
    const std::size_t gap = 4;
    std::size_t total_h = gap * (rows.size() - 1);
    for (const auto& img : rows) total_h += img.height;
    GrayImage stacked(total_h, rows[0].width, ValueRange::Unit);
    for (auto& v : stacked.values) v = 1.0f;
    std::size_t oy = 0;
    for (const auto& img : rows) {
      for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x) stacked.at(oy + y, x) = img.at(y, x);
      oy += img.height + gap;
    }
    const std::string p = (fs::path(out) / "fig3.pgm").string();
    write_pgm(stacked, p, 8);
    written.push_back(p);
  } else {
    throw ConfigError("report: unknown kind '" + kind +
                      "' (run|table1|table2|fig1|fig2|fig3)");
  }
  for (const auto& p : written) std::cout << "wrote " << p << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) g_invocation.emplace_back(argv[i]);
  CLI::App app{"synthetic-learning workbench: conditional GAN training with domain-consistency "
               "and privacy studies"};
  app.require_subcommand(1);

  // each subcommand owns its flag storage; callbacks run after parsing
  int rc = 0;
  auto guard = [&rc](auto fn) {
    return [fn = std::move(fn), &rc]() mutable {
      try {
        fn();
      } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        rc = 2;
      } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        rc = 2;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        rc = 1;
      }
    };
  };

  // toygen
  auto* toygen = app.add_subcommand("toygen", "generate the procedural spine dataset");
  auto tg = std::make_shared<GlobalFlags>();
  tg->attach(*toygen);
  auto tg_overlay = std::make_shared<Overlay>();
  tg_overlay->add(*toygen, "--count", "toygen", "count", "images to generate");
  tg_overlay->add(*toygen, "--resolution", "toygen", "resolution", "image side");
  tg_overlay->add(*toygen, "--class-count", "toygen", "class_count", "2 or 8 subclasses");
  tg_overlay->add(*toygen, "--abnormal-fraction", "toygen", "abnormal_fraction",
                  "fraction with a defect");
  tg_overlay->add(*toygen, "--noise-std", "toygen", "noise_std", "additive pixel noise");
  auto tg_out = std::make_shared<std::string>();
  toygen->add_option("--out", *tg_out, "output dataset directory")->required();
  toygen->callback(guard([tg, tg_overlay, tg_out] {
    CommandCtx ctx = make_ctx(*tg, *tg_overlay);
    cmd_toygen(ctx, resolve_out(*tg_out));
  }));

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "crop/resize a labeled PGM corpus to a dataset");
  auto pg = std::make_shared<GlobalFlags>();
  pg->attach(*prep);
  auto pg_overlay = std::make_shared<Overlay>();
  pg_overlay->add(*prep, "--target-resolution", "preprocess", "target_resolution",
                  "output image side");
  pg_overlay->add(*prep, "--min-dimension", "preprocess", "min_dimension",
                  "reject images smaller than this");
  pg_overlay->add(*prep, "--class-count", "preprocess", "class_count", "label classes");
  pg_overlay->add(*prep, "--bit-depth", "preprocess", "bit_depth", "output PGM depth (8|16)");
  auto pg_in = std::make_shared<std::string>();
  auto pg_out = std::make_shared<std::string>();
  prep->add_option("--in", *pg_in, "corpus directory with labels.csv")->required();
  prep->add_option("--out", *pg_out, "output dataset directory")->required();
  prep->callback(guard([pg, pg_overlay, pg_in, pg_out] {
    CommandCtx ctx = make_ctx(*pg, *pg_overlay);
    cmd_preprocess(ctx, *pg_in, resolve_out(*pg_out));
  }));

  // train-gan
  auto* tgan = app.add_subcommand("train-gan", "train the conditional GAN");
  auto gg = std::make_shared<GlobalFlags>();
  gg->attach(*tgan);
  auto gg_overlay = std::make_shared<Overlay>();
  gg_overlay->add(*tgan, "--resolution", "gan", "resolution", "image side");
  gg_overlay->add(*tgan, "--batch", "gan", "batch", "minibatch size");
  gg_overlay->add(*tgan, "--budget", "gan", "budget_images", "real images shown in total");
  gg_overlay->add(*tgan, "--interval", "gan", "checkpoint_interval",
                  "images between checkpoints");
  gg_overlay->add(*tgan, "--gamma", "gan", "gamma",
                  "domain-consistency weight (default 0.01 with a domain classifier, 0 without)");
  gg_overlay->add(*tgan, "--ada", "gan", "ada", "adaptive augmentation (true|false)");
  gg_overlay->add(*tgan, "--ada-target", "gan", "ada_target", "sign-heuristic target");
  gg_overlay->add(*tgan, "--dp", "gan", "dp", "clip+noise discriminator gradients (true|false)");
  gg_overlay->add(*tgan, "--dp-clip", "gan", "dp_clip", "gradient clip norm");
  gg_overlay->add(*tgan, "--dp-noise", "gan", "dp_noise", "gradient noise std");
  gg_overlay->add(*tgan, "--dp-microbatch", "gan", "dp_microbatch", "samples per microbatch");
  gg_overlay->add(*tgan, "--dp-arm", "gan", "dp_arm",
                  "named privacy arm (baseline|dp_full|dp_noise_0.02|dp_batch4|dp_noclip)");
  gg_overlay->add(*tgan, "--lr-g", "gan", "lr_g", "generator learning rate");
  gg_overlay->add(*tgan, "--lr-d", "gan", "lr_d", "discriminator learning rate");
  gg_overlay->add(*tgan, "--latent-dim", "gan", "latent_dim", "latent size");
  gg_overlay->add(*tgan, "--gen-widths", "gan", "gen_widths", "generator stage widths (csv)");
  gg_overlay->add(*tgan, "--disc-widths", "gan", "disc_widths",
                  "discriminator stage widths (csv)");
  gg_overlay->add(*tgan, "--log-interval", "gan", "log_interval", "images between log rows");
  auto gg_data = std::make_shared<std::string>();
  auto gg_out = std::make_shared<std::string>();
  auto gg_domain = std::make_shared<std::string>();
  tgan->add_option("--data", *gg_data, "training dataset directory")->required();
  tgan->add_option("--out", *gg_out, "checkpoint/output directory")->required();
  tgan->add_option("--domain-classifier", *gg_domain,
                   "frozen classifier checkpoint for the domain loss term");
  tgan->callback(guard([gg, gg_overlay, gg_data, gg_out, gg_domain] {
    CommandCtx ctx = make_ctx(*gg, *gg_overlay);
    cmd_train_gan(ctx, *gg_data, resolve_out(*gg_out), *gg_domain);
  }));

  // train-classifier
  auto* tcls = app.add_subcommand("train-classifier", "train the abnormality classifier");
  auto cg = std::make_shared<GlobalFlags>();
  cg->attach(*tcls);
  auto cg_overlay = std::make_shared<Overlay>();
  cg_overlay->add(*tcls, "--resolution", "classifier", "resolution", "model input side");
  cg_overlay->add(*tcls, "--widths", "classifier", "widths", "conv stage widths (csv)");
  cg_overlay->add(*tcls, "--epochs", "classifier", "epochs", "training epochs");
  cg_overlay->add(*tcls, "--batch", "classifier", "batch", "minibatch size");
  cg_overlay->add(*tcls, "--lr", "classifier", "lr", "learning rate");
  cg_overlay->add(*tcls, "--augment", "classifier", "augment", "train-time augmentation "
                  "(true|false)");
  cg_overlay->add(*tcls, "--holdout-fraction", "classifier", "holdout_fraction",
                  "carve a held-out split from the training set");
  auto cg_data = std::make_shared<std::string>();
  auto cg_out = std::make_shared<std::string>();
  auto cg_holdout = std::make_shared<std::string>();
  auto cg_test = std::make_shared<std::string>();
  tcls->add_option("--data", *cg_data, "training dataset directory")->required();
  tcls->add_option("--out", *cg_out, "output directory")->required();
  tcls->add_option("--holdout", *cg_holdout, "held-out dataset for per-epoch AUC");
  tcls->add_option("--test", *cg_test, "test dataset scored once after training");
  tcls->callback(guard([cg, cg_overlay, cg_data, cg_out, cg_holdout, cg_test] {
    CommandCtx ctx = make_ctx(*cg, *cg_overlay);
    cmd_train_classifier(ctx, *cg_data, resolve_out(*cg_out), *cg_holdout, *cg_test);
  }));

  // generate
  auto* gen = app.add_subcommand("generate", "sample images from a generator checkpoint");
  auto eg = std::make_shared<GlobalFlags>();
  eg->attach(*gen);
  auto eg_overlay = std::make_shared<Overlay>();
  eg_overlay->add(*gen, "--count", "generate", "count", "images to sample");
  eg_overlay->add(*gen, "--class-id", "generate", "class_id",
                  "fixed class (-1 cycles through classes)");
  eg_overlay->add(*gen, "--montage-columns", "generate", "montage_columns", "grid columns");
  auto eg_ckpt = std::make_shared<std::string>();
  auto eg_out = std::make_shared<std::string>();
  gen->add_option("--checkpoint", *eg_ckpt, "generator checkpoint")->required();
  gen->add_option("--out", *eg_out, "output directory")->required();
  gen->callback(guard([eg, eg_overlay, eg_ckpt, eg_out] {
    CommandCtx ctx = make_ctx(*eg, *eg_overlay);
    cmd_generate(ctx, *eg_ckpt, resolve_out(*eg_out));
  }));

  // metrics
  auto* met = app.add_subcommand("metrics", "FID and k-NN precision/recall per checkpoint");
  auto mg = std::make_shared<GlobalFlags>();
  mg->attach(*met);
  auto mg_overlay = std::make_shared<Overlay>();
  mg_overlay->add(*met, "--samples", "metrics", "samples", "generated/reference sample count");
  mg_overlay->add(*met, "--knn-k", "metrics", "knn_k", "neighborhood size");
  mg_overlay->add(*met, "--variant", "metrics", "variant", "variant label for the report");
  auto mg_ckpts = std::make_shared<std::string>();
  auto mg_data = std::make_shared<std::string>();
  auto mg_extractor = std::make_shared<std::string>();
  auto mg_out = std::make_shared<std::string>();
  met->add_option("--checkpoints", *mg_ckpts, "directory of generator checkpoints")->required();
  met->add_option("--data", *mg_data, "real reference dataset")->required();
  met->add_option("--extractor", *mg_extractor, "classifier checkpoint used as feature "
                  "extractor")->required();
  met->add_option("--out", *mg_out, "output directory")->required();
  met->callback(guard([mg, mg_overlay, mg_ckpts, mg_data, mg_extractor, mg_out] {
    CommandCtx ctx = make_ctx(*mg, *mg_overlay);
    cmd_metrics(ctx, *mg_ckpts, *mg_data, *mg_extractor, resolve_out(*mg_out));
  }));

  // accountant
  auto* acc = app.add_subcommand("accountant",
                                 "privacy accounting: spend curve or noise sweep");
  auto ag = std::make_shared<GlobalFlags>();
  ag->attach(*acc);
  auto ag_overlay = std::make_shared<Overlay>();
  ag_overlay->add(*acc, "--noise-grid", "accountant", "noise_grid",
                  "sweep grid, e.g. 0.03,0.06,0.1,0.2,0.3,...,1.5");
  ag_overlay->add(*acc, "--clip", "accountant", "clip", "gradient clip norm");
  ag_overlay->add(*acc, "--q", "accountant", "q", "subsampling rate (accepts p/q form)");
  ag_overlay->add(*acc, "--steps", "accountant", "steps", "optimizer step count");
  ag_overlay->add(*acc, "--delta", "accountant", "delta", "target delta (auto:N for 1/N)");
  ag_overlay->add(*acc, "--dataset-size", "accountant", "dataset_size",
                  "training set size (sets q and delta defaults)");
  ag_overlay->add(*acc, "--batch", "accountant", "batch", "minibatch size");
  ag_overlay->add(*acc, "--budget", "accountant", "budget_images", "total images shown");
  ag_overlay->add(*acc, "--interval", "accountant", "checkpoint_interval",
                  "curve resolution in images");
  ag_overlay->add(*acc, "--noise-std", "accountant", "noise_std", "noise std for curve mode");
  auto ag_out = std::make_shared<std::string>();
  acc->add_option("--out", *ag_out, "output CSV path")->required();
  acc->callback(guard([ag, ag_overlay, ag_out] {
    CommandCtx ctx = make_ctx(*ag, *ag_overlay);
    cmd_accountant(ctx, resolve_out(*ag_out));
  }));

  // matrix
  auto* mat = app.add_subcommand("matrix", "downstream synthetic-learning experiment matrix");
  auto xg = std::make_shared<GlobalFlags>();
  xg->attach(*mat);
  auto xg_overlay = std::make_shared<Overlay>();
  xg_overlay->add(*mat, "--arms", "matrix", "arms", "subset of the nine standard arms (csv)");
  xg_overlay->add(*mat, "--seeds", "matrix", "seeds", "replicate seeds (csv)");
  xg_overlay->add(*mat, "--resolution", "classifier", "resolution", "classifier input side");
  xg_overlay->add(*mat, "--widths", "classifier", "widths", "conv stage widths (csv)");
  xg_overlay->add(*mat, "--epochs", "classifier", "epochs", "training epochs");
  xg_overlay->add(*mat, "--batch", "classifier", "batch", "minibatch size");
  auto xg_data = std::make_shared<std::string>();
  auto xg_test = std::make_shared<std::string>();
  auto xg_baseline = std::make_shared<std::string>();
  auto xg_domain = std::make_shared<std::string>();
  auto xg_out = std::make_shared<std::string>();
  mat->add_option("--data", *xg_data, "real training dataset")->required();
  mat->add_option("--test", *xg_test, "real test dataset")->required();
  mat->add_option("--baseline-ckpt", *xg_baseline, "baseline GAN generator checkpoint");
  mat->add_option("--domain-ckpt", *xg_domain, "domain-loss GAN generator checkpoint");
  mat->add_option("--out", *xg_out, "output directory")->required();
  mat->callback(guard([xg, xg_overlay, xg_data, xg_test, xg_baseline, xg_domain, xg_out] {
    CommandCtx ctx = make_ctx(*xg, *xg_overlay);
    cmd_matrix(ctx, *xg_data, *xg_test, *xg_baseline, *xg_domain, resolve_out(*xg_out));
  }));

  // ablation
  auto* abl = app.add_subcommand("ablation", "gradient-privacy arm study");
  auto bg = std::make_shared<GlobalFlags>();
  bg->attach(*abl);
  auto bg_overlay = std::make_shared<Overlay>();
  bg_overlay->add(*abl, "--arms", "ablation", "arms", "arm names (csv)");
  bg_overlay->add(*abl, "--samples", "ablation", "samples", "metric sample count");
  bg_overlay->add(*abl, "--knn-k", "ablation", "knn_k", "neighborhood size");
  bg_overlay->add(*abl, "--sample-grid", "ablation", "sample_grid", "images per arm montage");
  bg_overlay->add(*abl, "--resolution", "gan", "resolution", "image side");
  bg_overlay->add(*abl, "--batch", "gan", "batch", "minibatch size (baseline arm)");
  bg_overlay->add(*abl, "--budget", "gan", "budget_images", "images shown per arm");
  bg_overlay->add(*abl, "--interval", "gan", "checkpoint_interval",
                  "images between checkpoints");
  auto bg_paper = std::make_shared<bool>(false);
  abl->add_flag("--paper-arms", *bg_paper, "exactly the four published privacy arms");
  auto bg_data = std::make_shared<std::string>();
  auto bg_out = std::make_shared<std::string>();
  auto bg_extractor = std::make_shared<std::string>();
  abl->add_option("--data", *bg_data, "training dataset directory")->required();
  abl->add_option("--out", *bg_out, "output directory")->required();
  abl->add_option("--extractor", *bg_extractor,
                  "classifier checkpoint for metric evaluation (optional)");
  abl->callback(guard([bg, bg_overlay, bg_data, bg_out, bg_extractor, bg_paper] {
    CommandCtx ctx = make_ctx(*bg, *bg_overlay);
    cmd_ablation(ctx, *bg_data, resolve_out(*bg_out), *bg_extractor, *bg_paper);
  }));

  // report
  auto* rep = app.add_subcommand("report", "assemble tables, figures, or a run summary");
  auto rg = std::make_shared<GlobalFlags>();
  rg->attach(*rep);
  auto rg_overlay = std::make_shared<Overlay>();
  auto rg_dirs = std::make_shared<std::vector<std::string>>();
  auto rg_kind = std::make_shared<std::string>("run");
  auto rg_out = std::make_shared<std::string>(".");
  rep->add_option("--run-dir", *rg_dirs, "run director(ies) holding the inputs")->required();
  rep->add_option("--kind", *rg_kind, "run|table1|table2|fig1|fig2|fig3");
  rep->add_option("--out", *rg_out, "output directory for table/figure kinds");
  rep->callback(guard([rg, rg_overlay, rg_dirs, rg_kind, rg_out] {
    CommandCtx ctx = make_ctx(*rg, *rg_overlay);
    cmd_report(ctx, *rg_dirs, *rg_kind, resolve_out(*rg_out));
  }));

  CLI11_PARSE(app, argc, argv);
  return rc;
}
