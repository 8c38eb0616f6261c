#pragma once

#include <ostream>

#include "config.hpp"

namespace slr::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Fits one model. Writes coefficients.json, trace.csv and summary.json.
/// Returns kExitNotConverged when the iteration cap was hit.
int cmd_train(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Solves the regularization path. Writes path.csv and coef_NN.json per point.
/// Returns kExitNotConverged when any point hit the iteration cap.
int cmd_path(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// k-fold cross-validation over the path. Writes cv.csv and cv_means.csv.
int cmd_cv(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Timing study on synthetic data. Writes bench.csv.
int cmd_bench(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace slr::cli
