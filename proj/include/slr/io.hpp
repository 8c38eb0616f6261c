#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "slr/dataset.hpp"

namespace slr {

struct CsvOptions {
  // Column holding the label; negative values count from the end (-1 is last).
  int label_column = -1;
  bool has_header = false;
  bool append_intercept = false;
};

/// Reads a comma-separated file with one sample per row.
///
/// Labels must be in {0,1} or {-1,+1}; -1 maps to 0. Errors name the
/// offending row (1-based, counting the header) and column.
Dataset<double> load_csv(const std::filesystem::path& path,
                         const CsvOptions& options = {});

/// Reads "label idx:val ..." lines with 1-based, strictly increasing indices.
/// The feature count is the larger of the maximum index seen and n_features.
Dataset<double> load_libsvm(const std::filesystem::path& path,
                            std::optional<Eigen::Index> n_features = {},
                            bool append_intercept = false);

/// Writes nonzero entries with 17 significant digits, so load_libsvm
/// reproduces the features bit for bit (given the feature count).
void write_libsvm(std::ostream& out, const Dataset<double>& data);

void write_csv(std::ostream& out, const Dataset<double>& data);

}  // namespace slr
