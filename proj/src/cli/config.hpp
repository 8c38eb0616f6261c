#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slr/dataset.hpp"
#include "slr/path.hpp"
#include "slr/penalty.hpp"
#include "slr/solver.hpp"

namespace slr::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataFormat { Csv, Libsvm, Synthetic };

struct DataSource {
  DataFormat format = DataFormat::Csv;
  std::filesystem::path path;
  int label_column = -1;
  bool has_header = false;
  bool intercept = false;
  std::optional<Eigen::Index> n_features;  // libsvm only
  SyntheticSpec synthetic;                 // seed comes from RunConfig::seed
};

struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::L1;
  // Absolute lambda; when unset lambda = lambda_frac * lambda_max.
  std::optional<double> lambda;
  double lambda_frac = 0.1;
  std::optional<double> theta;
  // Absolute capped-l1 cap; when unset the cap is half of lambda.
  std::optional<double> epsilon;

  Penalty<double> make(double lam) const;
};

struct BenchSpec {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> grid{{1000, 500}, {1000, 1000}};
  double lambda_frac = 0.1;
  int repetitions = 3;
  std::vector<Variant> variants{Variant::IstaBB, Variant::IstaReverse, Variant::FistaLipschitz};
  int workers = 1;
  Eigen::Index n_nonzero = 10;

  void validate() const;
};

struct RunConfig {
  DataSource data;
  PenaltyConfig penalty;
  SolverOptions<double> solver;
  std::vector<double> fractions = kDefaultPathFractions;
  bool warm_start = true;
  int folds = 5;
  BenchSpec bench;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  int trace_every = 1;

  void validate() const;
};

/// Overlays a JSON config file onto cfg. Relative data paths resolve against
/// the config file's directory. Unknown keys are rejected.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& file);

DataFormat parse_format(std::string_view name);
std::string_view to_string(DataFormat f);

/// "1000x500,1000x1000"
std::vector<std::pair<Eigen::Index, Eigen::Index>> parse_grid(std::string_view text);

Dataset<double> load_dataset(const RunConfig& cfg);

}  // namespace slr::cli
