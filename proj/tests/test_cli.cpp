// End-to-end tests of the command-line front end, run as subprocesses against
// the installed binary (located via SYNTHLEARN_CLI). Covers config resolution
// order, strict key consumption, manifest replay, and output byte stability.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "synthlearn/csv.hpp"
#include "synthlearn/manifest.hpp"

namespace fs = std::filesystem;
using namespace synthlearn;

namespace {

std::string cli_path() {
  const char* p = std::getenv("SYNTHLEARN_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SYNTHLEARN_CLI must point at the CLI binary");
  return p;
}

fs::path scratch_root() {
  static fs::path root = [] {
    fs::path r = fs::temp_directory_path() / "synthlearn_test_cli";
    fs::remove_all(r);
    fs::create_directories(r);
    return r;
  }();
  return root;
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = scratch_root() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out, err;
};

// Runs the CLI through /bin/sh with each argument single-quoted. Arguments in
// these tests never contain quote characters.
CliResult run_cli(const std::vector<std::string>& args, const std::string& out_root = "") {
  static int counter = 0;
  const fs::path log_dir = scratch_root() / "logs";
  fs::create_directories(log_dir);
  const fs::path out_file = log_dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err_file = log_dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;

  std::string cmd;
  if (!out_root.empty()) cmd += "SYNTHLEARN_OUT_ROOT='" + out_root + "' ";
  cmd += "'" + cli_path() + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >'" + out_file.string() + "' 2>'" + err_file.string() + "'";

  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  REQUIRE(out.good());
}

std::vector<double> column_as_double(const CsvTable& t, const std::string& name) {
  const std::size_t c = t.column_index(name);
  std::vector<double> v;
  for (const auto& row : t.rows) v.push_back(std::stod(row[c]));
  return v;
}

}  // namespace

TEST_CASE("toygen writes a dataset plus a manifest recording the invocation") {
  const fs::path dir = fresh_dir("toygen_basic") / "ds";
  const std::vector<std::string> args = {"toygen",  "--out",        dir.string(), "--count",
                                         "12",      "--resolution", "32",         "--seed",
                                         "9"};
  CliResult r = run_cli(args);
  CAPTURE(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("wrote 12 toy images") != std::string::npos);

  CHECK(fs::exists(dir / "dataset.meta"));
  CHECK(fs::exists(dir / "dataset.csv"));
  CHECK(fs::exists(dir / "img_000000.pgm"));
  CHECK(fs::exists(dir / "img_000011.pgm"));
  CHECK_FALSE(fs::exists(dir / "img_000012.pgm"));
  CHECK_FALSE(fs::exists(dir / ".lock"));  // released when the run finishes

  const std::string meta = slurp(dir / "dataset.meta");
  CHECK(meta.find("resolution 32") != std::string::npos);
  CHECK(meta.find("class_count 2") != std::string::npos);

  RunManifest m = read_manifest((dir / "manifest.txt").string());
  CHECK(m.command == "toygen");
  CHECK(m.profile == "desk");
  CHECK(m.seed == 9);
  CHECK(m.argv == args);
  REQUIRE(m.outputs.size() == 1);
  CHECK(m.outputs[0] == dir.string());
  CHECK(m.config_text.find("[toygen]") != std::string::npos);
  CHECK(m.config_text.find("count = 12") != std::string::npos);
  CHECK(m.config_text.find("seed = 9") != std::string::npos);
}

TEST_CASE("equal seeds reproduce dataset bytes; different seeds do not") {
  const fs::path root = fresh_dir("toygen_repro");
  auto gen = [&](const std::string& name, const std::string& seed) {
    const fs::path d = root / name;
    CliResult r = run_cli({"toygen", "--out", d.string(), "--count", "10", "--resolution", "32",
                           "--seed", seed});
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    return d;
  };
  const fs::path a = gen("a", "5");
  const fs::path b = gen("b", "5");
  const fs::path c = gen("c", "6");
  for (const char* f : {"dataset.csv", "dataset.meta", "img_000000.pgm", "img_000009.pgm"})
    CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "img_000000.pgm") != slurp(c / "img_000000.pgm"));
}

TEST_CASE("config file values apply and explicit flags take precedence") {
  const fs::path root = fresh_dir("toygen_config");
  const fs::path cfg = root / "run.cfg";
  write_text(cfg,
             "[run]\n"
             "seed = 4\n"
             "\n"
             "[toygen]\n"
             "count = 6\n"
             "resolution = 32\n");

  const fs::path from_file = root / "from_file";
  CliResult r1 = run_cli({"toygen", "--config", cfg.string(), "--out", from_file.string()});
  CAPTURE(r1.err);
  REQUIRE(r1.exit_code == 0);
  RunManifest m1 = read_manifest((from_file / "manifest.txt").string());
  CHECK(m1.seed == 4);
  CHECK(m1.config_text.find("count = 6") != std::string::npos);
  CHECK(fs::exists(from_file / "img_000005.pgm"));
  CHECK_FALSE(fs::exists(from_file / "img_000006.pgm"));

  // flags override file keys for both the seed and the section values
  const fs::path overridden = root / "overridden";
  CliResult r2 = run_cli({"toygen", "--config", cfg.string(), "--count", "9", "--seed", "11",
                          "--out", overridden.string()});
  CAPTURE(r2.err);
  REQUIRE(r2.exit_code == 0);
  RunManifest m2 = read_manifest((overridden / "manifest.txt").string());
  CHECK(m2.seed == 11);
  CHECK(m2.config_text.find("count = 9") != std::string::npos);
  CHECK(fs::exists(overridden / "img_000008.pgm"));

  // file-driven and flag-driven runs share one resolution path: same bytes
  const fs::path from_flags = root / "from_flags";
  CliResult r3 = run_cli({"toygen", "--count", "6", "--resolution", "32", "--seed", "4", "--out",
                          from_flags.string()});
  CAPTURE(r3.err);
  REQUIRE(r3.exit_code == 0);
  CHECK(slurp(from_file / "dataset.csv") == slurp(from_flags / "dataset.csv"));
  CHECK(slurp(from_file / "img_000000.pgm") == slurp(from_flags / "img_000000.pgm"));
}

TEST_CASE("unknown config keys abort with exit code 2 before any output") {
  const fs::path root = fresh_dir("toygen_strict");

  SUBCASE("typo in the active section") {
    const fs::path cfg = root / "typo.cfg";
    write_text(cfg, "[toygen]\ncount = 6\ncountt = 3\n");
    const fs::path out = root / "out_typo";
    fs::remove_all(out);
    CliResult r = run_cli({"toygen", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("config error") != std::string::npos);
    CHECK(r.err.find("[toygen] countt") != std::string::npos);
    CHECK_FALSE(fs::exists(out));  // validation precedes directory creation
  }

  SUBCASE("key for a section the command never reads") {
    const fs::path cfg = root / "foreign.cfg";
    write_text(cfg, "[toygen]\ncount = 6\n\n[gan]\nbatch = 4\n");
    const fs::path out = root / "out_foreign";
    fs::remove_all(out);
    CliResult r = run_cli({"toygen", "--config", cfg.string(), "--out", out.string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("[gan] batch") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
  }

  SUBCASE("missing config file") {
    CliResult r = run_cli({"toygen", "--config", (root / "absent.cfg").string(), "--out",
                           (root / "out_absent").string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("cannot open config file") != std::string::npos);
  }
}

TEST_CASE("global flag validation") {
  const fs::path root = fresh_dir("cli_validation");

  SUBCASE("unknown profile") {
    CliResult r = run_cli({"toygen", "--profile", "lab", "--out", (root / "p").string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unknown profile") != std::string::npos);
  }

  SUBCASE("unsupported numeric mode") {
    const fs::path cfg = root / "f64.cfg";
    write_text(cfg, "[run]\nnumeric_mode = f64\n");
    CliResult r = run_cli({"toygen", "--config", cfg.string(), "--out", (root / "m").string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("only f32") != std::string::npos);
  }

  SUBCASE("missing required option") {
    CliResult r = run_cli({"toygen", "--count", "5"});
    CHECK(r.exit_code != 0);
    CHECK(r.err.find("--out") != std::string::npos);
  }

  SUBCASE("unknown flag") {
    CliResult r = run_cli({"toygen", "--out", (root / "u").string(), "--bogus", "3"});
    CHECK(r.exit_code != 0);
    CHECK_FALSE(r.err.empty());
  }

  SUBCASE("subcommand is required") {
    CliResult r = run_cli({});
    CHECK(r.exit_code != 0);
  }
}

TEST_CASE("accountant noise sweep: schema, selection, manifest, byte-stable rerun") {
  const fs::path root = fresh_dir("accountant_sweep");
  const fs::path csv1 = root / "sweep1.csv";
  const std::vector<std::string> args = {"accountant", "--noise-grid", "0.1,0.2,0.3",
                                         "--q",        "0.01",         "--steps",
                                         "1000",       "--delta",      "1e-5",
                                         "--clip",     "1.5",          "--out",
                                         csv1.string()};
  CliResult r = run_cli(args);
  CAPTURE(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("selected noise_std") != std::string::npos);

  CsvTable t = read_csv(csv1.string());
  REQUIRE(t.header == std::vector<std::string>{"noise_std", "noise_multiplier", "epsilon",
                                               "alpha_star", "selected"});
  REQUIRE(t.rows.size() == 3);
  const std::vector<double> noise = column_as_double(t, "noise_std");
  const std::vector<double> sigma = column_as_double(t, "noise_multiplier");
  const std::vector<double> eps = column_as_double(t, "epsilon");
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(sigma[i] == doctest::Approx(noise[i] / 1.5).epsilon(1e-9));
  CHECK(eps[0] > eps[1]);
  CHECK(eps[1] > eps[2]);
  int selected = 0;
  const std::size_t sel_col = t.column_index("selected");
  for (const auto& row : t.rows) selected += row[sel_col] == "1" ? 1 : 0;
  CHECK(selected == 1);

  RunManifest m = read_manifest(csv1.string() + ".manifest");
  CHECK(m.command == "accountant");
  REQUIRE(m.outputs.size() == 1);
  CHECK(m.outputs[0] == csv1.string());
  CHECK(m.argv == args);

  // the accountant is pure arithmetic: reruns are byte-identical
  const fs::path csv2 = root / "sweep2.csv";
  std::vector<std::string> again = args;
  again.back() = csv2.string();
  CliResult r2 = run_cli(again);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(csv1) == slurp(csv2));
}

TEST_CASE("accountant spend curve and configuration errors") {
  const fs::path root = fresh_dir("accountant_curve");

  SUBCASE("curve over a budget that divides evenly") {
    const fs::path csv = root / "curve.csv";
    CliResult r = run_cli({"accountant", "--dataset-size", "3773", "--batch", "32", "--budget",
                           "9000", "--interval", "3000", "--noise-std", "0.3", "--out",
                           csv.string()});
    CAPTURE(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("epsilon at 9000 images") != std::string::npos);
    CsvTable t = read_csv(csv.string());
    REQUIRE(t.header == std::vector<std::string>{"images_shown", "epsilon", "alpha_star"});
    const std::vector<double> shown = column_as_double(t, "images_shown");
    CHECK(shown == std::vector<double>{3000, 6000, 9000});
    const std::vector<double> eps = column_as_double(t, "epsilon");
    CHECK(eps[0] <= eps[1]);
    CHECK(eps[1] <= eps[2]);
  }

  SUBCASE("q accepts a fraction in p/q form") {
    const fs::path csv = root / "frac.csv";
    CliResult r = run_cli({"accountant", "--noise-grid", "0.2,0.4", "--q", "32/3773", "--steps",
                           "500", "--delta", "auto:3773", "--out", csv.string()});
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
  }

  SUBCASE("delta or dataset size is mandatory") {
    CliResult r = run_cli({"accountant", "--noise-grid", "0.2,0.4", "--q", "0.01", "--steps",
                           "10", "--out", (root / "x.csv").string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("need --delta or --dataset-size") != std::string::npos);
  }

  SUBCASE("q must lie in (0, 1]") {
    CliResult r = run_cli({"accountant", "--noise-grid", "0.2,0.4", "--q", "1.5", "--steps",
                           "10", "--delta", "1e-5", "--out", (root / "y.csv").string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("must lie in (0, 1]") != std::string::npos);
  }

  SUBCASE("curve mode requires the dataset size") {
    CliResult r = run_cli({"accountant", "--q", "0.01", "--delta", "1e-5", "--steps", "10",
                           "--out", (root / "z.csv").string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("need --dataset-size") != std::string::npos);
  }
}

TEST_CASE("replaying a manifest's argv reproduces outputs byte for byte") {
  // relative --out plus SYNTHLEARN_OUT_ROOT lets one recorded argv rerun into
  // a different root for comparison
  const fs::path root_a = fresh_dir("replay_a");
  const fs::path root_b = fresh_dir("replay_b");

  CliResult r1 = run_cli({"toygen", "--out", "runs/toy", "--count", "10", "--resolution", "32",
                          "--seed", "3"},
                         root_a.string());
  CAPTURE(r1.err);
  REQUIRE(r1.exit_code == 0);
  RunManifest m = read_manifest((root_a / "runs/toy/manifest.txt").string());

  CliResult r2 = run_cli(m.argv, root_b.string());
  CAPTURE(r2.err);
  REQUIRE(r2.exit_code == 0);
  for (const char* f : {"dataset.csv", "dataset.meta", "img_000000.pgm", "img_000009.pgm"})
    CHECK(slurp(root_a / "runs/toy" / f) == slurp(root_b / "runs/toy" / f));

  // same replay contract for a CSV-producing command
  CliResult r3 = run_cli({"accountant", "--noise-grid", "0.2,0.4", "--q", "0.01", "--steps",
                          "100", "--delta", "1e-5", "--out", "acc/sweep.csv"},
                         root_a.string());
  CAPTURE(r3.err);
  REQUIRE(r3.exit_code == 0);
  RunManifest ma = read_manifest((root_a / "acc/sweep.csv.manifest").string());
  CliResult r4 = run_cli(ma.argv, root_b.string());
  REQUIRE(r4.exit_code == 0);
  CHECK(slurp(root_a / "acc/sweep.csv") == slurp(root_b / "acc/sweep.csv"));
}

TEST_CASE("output directory lock rejects concurrent runs") {
  const fs::path dir = fresh_dir("locked_out");
  write_text(dir / ".lock", "");
  CliResult r = run_cli({"toygen", "--out", dir.string(), "--count", "4", "--resolution", "32"});
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("locked") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "dataset.csv"));

  fs::remove(dir / ".lock");
  CliResult r2 = run_cli({"toygen", "--out", dir.string(), "--count", "4", "--resolution",
                          "32"});
  CAPTURE(r2.err);
  CHECK(r2.exit_code == 0);
  CHECK(fs::exists(dir / "dataset.csv"));
}

TEST_CASE("report command validates its inputs") {
  const fs::path dir = fresh_dir("report_empty");

  SUBCASE("directory with no recognized inputs") {
    CliResult r = run_cli({"report", "--run-dir", dir.string()});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("no report inputs found") != std::string::npos);
  }

  SUBCASE("unknown kind") {
    CliResult r = run_cli({"report", "--run-dir", dir.string(), "--kind", "bogus"});
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unknown kind") != std::string::npos);
  }
}
