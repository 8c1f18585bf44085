#include "synthlearn/report.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "synthlearn/common.hpp"
#include "synthlearn/csv.hpp"
#include "synthlearn/plot.hpp"

namespace fs = std::filesystem;

namespace synthlearn {

namespace {

std::vector<double> column(const CsvTable& t, const std::string& name) {
  std::size_t idx = t.column_index(name);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) out.push_back(std::strtod(row[idx].c_str(), nullptr));
  return out;
}

void markdown_table(std::ostringstream& md, const CsvTable& t) {
  md << "|";
  for (const auto& h : t.header) md << " " << h << " |";
  md << "\n|";
  for (std::size_t i = 0; i < t.header.size(); ++i) md << " --- |";
  md << "\n";
  for (const auto& row : t.rows) {
    md << "|";
    for (const auto& f : row) md << " " << f << " |";
    md << "\n";
  }
}

}  // namespace

std::vector<std::string> write_run_report(const std::string& dir) {
  std::vector<std::string> written;
  std::ostringstream md;
  md << "# Run report\n";

  auto path_of = [&](const std::string& name) { return (fs::path(dir) / name).string(); };
  auto exists = [&](const std::string& name) { return fs::exists(path_of(name)); };
  auto emit_plot = [&](const std::string& name, const PlotSpec& spec) {
    write_svg_plot(path_of(name), spec);
    written.push_back(path_of(name));
    md << "\n![" << spec.title << "](" << name << ")\n";
  };

  if (exists("train_log.csv")) {
    CsvTable t = read_csv(path_of("train_log.csv"));
    std::vector<double> images = column(t, "images_shown");
    PlotSpec spec;
    spec.title = "Training losses";
    spec.xlabel = "images shown";
    spec.ylabel = "loss";
    spec.series.push_back({"discriminator", images, column(t, "d_loss")});
    spec.series.push_back({"generator", images, column(t, "g_loss")});
    md << "\n## Training\n";
    emit_plot("train_losses.svg", spec);
    PlotSpec aug;
    aug.title = "Augmentation strength";
    aug.xlabel = "images shown";
    aug.ylabel = "p";
    aug.series.push_back({"ada p", images, column(t, "ada_p")});
    emit_plot("ada_p.svg", aug);
  }

  if (exists("metrics.csv")) {
    CsvTable t = read_csv(path_of("metrics.csv"));
    std::vector<double> images = column(t, "images_shown");
    PlotSpec fid_spec;
    fid_spec.title = "Generative quality over training";
    fid_spec.xlabel = "images shown";
    fid_spec.ylabel = "FID";
    fid_spec.series.push_back({"fid", images, column(t, "fid")});
    md << "\n## Checkpoint metrics\n\n";
    markdown_table(md, t);
    emit_plot("metrics_fid.svg", fid_spec);
    PlotSpec pr;
    pr.title = "Sample fidelity and coverage";
    pr.xlabel = "images shown";
    pr.ylabel = "fraction";
    pr.series.push_back({"precision", images, column(t, "precision")});
    pr.series.push_back({"recall", images, column(t, "recall")});
    emit_plot("metrics_pr.svg", pr);
  }

  if (exists("privacy_curve.csv")) {
    CsvTable t = read_csv(path_of("privacy_curve.csv"));
    PlotSpec spec;
    spec.title = "Privacy cost over training";
    spec.xlabel = "images shown";
    spec.ylabel = "epsilon";
    spec.log_y = true;
    spec.series.push_back({"epsilon", column(t, "images_shown"), column(t, "epsilon")});
    md << "\n## Privacy accounting\n\n";
    markdown_table(md, t);
    emit_plot("privacy_curve.svg", spec);
  }

  if (exists("noise_sweep.csv")) {
    CsvTable t = read_csv(path_of("noise_sweep.csv"));
    std::vector<double> noise = column(t, "noise_std");
    std::vector<double> eps = column(t, "epsilon");
    PlotSpec spec;
    spec.title = "Noise sweep";
    spec.xlabel = "noise std";
    spec.ylabel = "epsilon";
    spec.log_y = true;
    spec.series.push_back({"epsilon", noise, eps});
    std::size_t sel = t.column_index("selected");
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      if (t.rows[i][sel] == "1") spec.markers.emplace_back(noise[i], eps[i]);
    md << "\n## Noise selection\n\n";
    markdown_table(md, t);
    emit_plot("noise_sweep.svg", spec);
  }

  if (exists("matrix.csv")) {
    CsvTable t = read_csv(path_of("matrix.csv"));
    md << "\n## Training-source comparison\n\n";
    markdown_table(md, t);
  }

  if (exists("ablation.csv")) {
    CsvTable t = read_csv(path_of("ablation.csv"));
    md << "\n## Gradient-privacy arm study\n\n";
    markdown_table(md, t);
  }

  if (written.empty() && md.str() == "# Run report\n")
    throw ConfigError("no report inputs found in " + dir);

  std::string report_path = path_of("report.md");
  std::ofstream f(report_path, std::ios::binary);
  if (!f) throw IoError("cannot write report: " + report_path);
  std::string body = md.str();
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw IoError("report write failed: " + report_path);
  written.insert(written.begin(), report_path);
  return written;
}

}  // namespace synthlearn
