#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "synthlearn/csv.hpp"
#include "synthlearn/plot.hpp"
#include "synthlearn/report.hpp"
#include "synthlearn/common.hpp"

using namespace synthlearn;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& leaf) {
  fs::path dir = fs::temp_directory_path() / ("synthlearn_report_" + leaf);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("csv writer round-trips awkward fields through the reader") {
  CsvWriter w({"name", "value", "note"});
  w.row({"plain", "1.5", "ok"});
  w.row({"with,comma", "2", "quote\"inside"});
  w.row({"multi\nline", "3", ""});
  const std::string text = w.render();
  CHECK(text == w.render());  // rendering is deterministic

  fs::path dir = fresh_dir("csv");
  const std::string path = (dir / "t.csv").string();
  w.write(path);
  CsvTable t = read_csv(path);
  REQUIRE(t.header == std::vector<std::string>{"name", "value", "note"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0] == std::vector<std::string>{"plain", "1.5", "ok"});
  CHECK(t.rows[1] == std::vector<std::string>{"with,comma", "2", "quote\"inside"});
  CHECK(t.rows[2] == std::vector<std::string>{"multi\nline", "3", ""});
  CHECK(t.column_index("value") == 1);
  CHECK_THROWS_AS((void)t.column_index("absent"), ConfigError);
}

TEST_CASE("csv writer enforces the header width") {
  CsvWriter w({"a", "b"});
  w.row({"1", "2"});
  CHECK_THROWS_AS(w.row({"only_one"}), ContractError);
}

TEST_CASE("csv reader rejects missing, empty, and ragged files") {
  fs::path dir = fresh_dir("csv_bad");
  CHECK_THROWS_AS((void)read_csv((dir / "missing.csv").string()), ConfigError);

  const std::string empty_path = (dir / "empty.csv").string();
  std::ofstream(empty_path).flush();
  CHECK_THROWS_AS((void)read_csv(empty_path), ConfigError);

  const std::string ragged_path = (dir / "ragged.csv").string();
  std::ofstream(ragged_path) << "a,b\n1,2\n3\n";
  CHECK_THROWS_AS((void)read_csv(ragged_path), ConfigError);
}

TEST_CASE("numeric formatting is fixed and platform-stable") {
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(1.0 / 3.0) == "0.333333333");
  CHECK(format_double(167070752.0) == "167070752");
  CHECK(format_double(10430820800.0) == "1.04308208e+10");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(format_double(0.2, 17) == "0.20000000000000001");
}

TEST_CASE("svg plots carry their series, labels, and markers") {
  fs::path dir = fresh_dir("svg");
  PlotSpec spec;
  spec.title = "Demo curve";
  spec.xlabel = "steps";
  spec.ylabel = "score";
  spec.log_y = true;
  spec.series.push_back({"alpha", {1, 2, 3, 4}, {10.0, 5.0, 2.0, 1.0}});
  spec.series.push_back({"beta", {1, 2, 3, 4}, {1.0, 2.0, 4.0, 8.0}});
  spec.markers.emplace_back(3.0, 2.0);
  const std::string path = (dir / "plot.svg").string();
  write_svg_plot(path, spec);
  const std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("Demo curve") != std::string::npos);
  CHECK(svg.find("steps") != std::string::npos);
  CHECK(svg.find("score") != std::string::npos);
  CHECK(svg.find("alpha") != std::string::npos);
  CHECK(svg.find("beta") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("circle") != std::string::npos);

  // nonpositive values on a log axis break the line instead of corrupting it
  PlotSpec logspec;
  logspec.title = "log";
  logspec.log_y = true;
  logspec.series.push_back({"s", {1, 2, 3}, {10.0, 0.0, 5.0}});
  const std::string path2 = (dir / "log.svg").string();
  write_svg_plot(path2, logspec);
  const std::string svg2 = slurp(path2);
  CHECK(svg2.find("nan") == std::string::npos);
  CHECK(svg2.find("inf") == std::string::npos);
}

TEST_CASE("montage packs equally sized tiles into a gapped grid") {
  std::vector<GrayImage> tiles;
  for (int i = 0; i < 5; ++i) {
    GrayImage img(4, 4);
    for (auto& v : img.values) v = static_cast<float>(i) / 10.0f;
    tiles.push_back(img);
  }
  GrayImage grid = montage(tiles, 2);
  // 3 rows x 2 cols of 4px tiles with 2px gaps
  CHECK(grid.height == 3 * 4 + 2 * 2);
  CHECK(grid.width == 2 * 4 + 1 * 2);
  CHECK(grid.at(0, 0) == doctest::Approx(0.0));
  CHECK(grid.at(0, 6) == doctest::Approx(0.1));   // tile 1 starts at x = 4 + 2
  CHECK(grid.at(6, 0) == doctest::Approx(0.2));   // tile 2 starts at y = 4 + 2
  CHECK(grid.at(12, 0) == doctest::Approx(0.4));  // tile 4, third row
  CHECK(grid.at(12, 6) == doctest::Approx(0.0));  // no sixth tile: background

  CHECK_THROWS_AS((void)montage({}, 2), ContractError);
  CHECK_THROWS_AS((void)montage(tiles, 0), ContractError);
  std::vector<GrayImage> ragged{GrayImage(4, 4), GrayImage(5, 4)};
  CHECK_THROWS_AS((void)montage(ragged, 2), ContractError);
}

TEST_CASE("run reports assemble sections from whichever artifacts exist") {
  fs::path dir = fresh_dir("runreport");
  {
    CsvWriter w({"images_shown", "d_loss", "g_loss", "ada_p"});
    w.row({"100", "1.3", "0.7", "0"});
    w.row({"200", "1.2", "0.8", "0.01"});
    w.write((dir / "train_log.csv").string());
  }
  {
    CsvWriter w({"file", "images_shown", "fid", "precision", "recall"});
    w.row({"g_000000100.ckpt", "100", "45.5", "0.5", "0.25"});
    w.row({"g_000000200.ckpt", "200", "31.25", "0.6", "0.4"});
    w.write((dir / "metrics.csv").string());
  }
  {
    CsvWriter w({"noise_std", "noise_multiplier", "epsilon", "alpha_star", "selected"});
    w.row({"0.1", "0.0666666667", "1000", "2", "0"});
    w.row({"0.2", "0.133333333", "100", "2", "1"});
    w.write((dir / "noise_sweep.csv").string());
  }

  std::vector<std::string> written = write_run_report(dir.string());
  REQUIRE_FALSE(written.empty());
  CHECK(fs::path(written[0]).filename() == "report.md");
  for (const auto& p : written) CHECK(fs::exists(p));

  const std::string md = slurp(written[0]);
  CHECK(md.find("## Training") != std::string::npos);
  CHECK(md.find("## Checkpoint metrics") != std::string::npos);
  CHECK(md.find("## Noise selection") != std::string::npos);
  CHECK(md.find("train_losses.svg") != std::string::npos);
  CHECK(md.find("metrics_fid.svg") != std::string::npos);
  CHECK(md.find("noise_sweep.svg") != std::string::npos);
  CHECK(md.find("g_000000200.ckpt") != std::string::npos);
  // sections without inputs stay absent
  CHECK(md.find("## Privacy accounting") == std::string::npos);
  CHECK(md.find("## Training-source comparison") == std::string::npos);

  fs::path empty = fresh_dir("runreport_empty");
  CHECK_THROWS_AS((void)write_run_report(empty.string()), ConfigError);
}
