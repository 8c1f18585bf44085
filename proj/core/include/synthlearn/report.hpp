#pragma once

#include <string>
#include <vector>

namespace synthlearn {

// Assembles report.md plus SVG charts from whichever run artifacts exist in
// `dir` (train_log.csv, metrics.csv, privacy_curve.csv, noise_sweep.csv,
// matrix.csv, ablation.csv). Returns the paths written, report.md first.
std::vector<std::string> write_run_report(const std::string& dir);

}  // namespace synthlearn
