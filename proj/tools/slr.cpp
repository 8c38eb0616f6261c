// Command-line front end: slr train | path | cv | bench.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/commands.hpp"

namespace {

using namespace slr;
using namespace slr::cli;

// Flag values; unset flags leave the config file (or default) in place.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> data;
  std::optional<std::string> format;
  std::optional<int> label_column;
  bool header = false;
  bool intercept = false;
  std::optional<std::string> synthetic;
  std::optional<std::string> penalty;
  std::optional<double> lambda;
  std::optional<double> lambda_frac;
  std::optional<double> theta;
  std::optional<double> epsilon;
  std::optional<std::string> variant;
  std::optional<std::string> criterion;
  std::optional<std::string> init;
  std::optional<double> eta;
  std::optional<double> L0;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<int> max_backtracks;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trace_every;
  std::vector<double> fractions;
  bool no_warm_start = false;
  std::optional<int> folds;
  std::optional<std::string> grid;
  std::optional<int> repetitions;
  std::vector<std::string> variants;
  std::optional<int> workers;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--data", o.data, "dataset file");
  app->add_option("--format", o.format, "csv | libsvm | synthetic");
  app->add_option("--label-column", o.label_column, "CSV label column (negative counts from end)");
  app->add_flag("--header", o.header, "CSV file has a header line");
  app->add_flag("--intercept", o.intercept, "append a constant-1 feature");
  app->add_option("--synthetic", o.synthetic, "synthetic data as N,D,K (implies --format synthetic)");
  app->add_option("--penalty", o.penalty, "l1 | scad | mcp | capped_l1");
  app->add_option("--lambda", o.lambda, "absolute regularization weight");
  app->add_option("--lambda-frac", o.lambda_frac, "lambda as a fraction of lambda_max");
  app->add_option("--theta", o.theta, "SCAD/MCP shape parameter");
  app->add_option("--epsilon", o.epsilon, "capped-l1 cap");
  app->add_option("--variant", o.variant,
                  "ista_bb | ista_reverse | fista_lip | ista_vanilla | fista_vanilla");
  app->add_option("--criterion", o.criterion, "auto | convex | sufficient_decrease");
  app->add_option("--init", o.init, "zeros | random");
  app->add_option("--eta", o.eta, "line-search growth factor (> 1)");
  app->add_option("--L0", o.L0, "fixed initial L instead of the Lipschitz constant");
  app->add_option("--tol", o.tol, "relative objective-change stopping tolerance");
  app->add_option("--max-iters", o.max_iters, "iteration cap");
  app->add_option("--max-backtracks", o.max_backtracks, "line-search cap");
  app->add_option("--seed", o.seed, "seed for data generation, initialization and folds");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--trace-every", o.trace_every, "keep every N-th trace row");
}

void apply(const Overrides& o, RunConfig& cfg) {
  if (o.config) apply_config_file(cfg, *o.config);
  if (o.data) {
    cfg.data.path = *o.data;
    if (cfg.data.format == DataFormat::Synthetic) cfg.data.format = DataFormat::Csv;
  }
  if (o.format) cfg.data.format = parse_format(*o.format);
  if (o.label_column) cfg.data.label_column = *o.label_column;
  if (o.header) cfg.data.has_header = true;
  if (o.intercept) cfg.data.intercept = true;
  if (o.synthetic) {
    const auto parts = CLI::detail::split(*o.synthetic, ',');
    if (parts.size() != 3) throw ConfigError("--synthetic expects N,D,K");
    cfg.data.format = DataFormat::Synthetic;
    cfg.data.synthetic.n_samples = std::stol(parts[0]);
    cfg.data.synthetic.n_features = std::stol(parts[1]);
    cfg.data.synthetic.n_nonzero = std::stol(parts[2]);
  }
  if (o.penalty) cfg.penalty.kind = parse_penalty_kind(*o.penalty);
  if (o.lambda) cfg.penalty.lambda = *o.lambda;
  if (o.lambda_frac) {
    cfg.penalty.lambda_frac = *o.lambda_frac;
    cfg.penalty.lambda.reset();
    cfg.bench.lambda_frac = *o.lambda_frac;
  }
  if (o.theta) cfg.penalty.theta = *o.theta;
  if (o.epsilon) cfg.penalty.epsilon = *o.epsilon;
  if (o.variant) cfg.solver.variant = parse_variant(*o.variant);
  if (o.criterion) cfg.solver.criterion = parse_criterion(*o.criterion);
  if (o.init) cfg.solver.init = parse_init_kind(*o.init);
  if (o.eta) cfg.solver.eta = *o.eta;
  if (o.L0) cfg.solver.fixed_initial_L = *o.L0;
  if (o.tol) cfg.solver.tol = *o.tol;
  if (o.max_iters) cfg.solver.max_iters = *o.max_iters;
  if (o.max_backtracks) cfg.solver.max_backtracks = *o.max_backtracks;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.trace_every) cfg.trace_every = *o.trace_every;
  if (!o.fractions.empty()) cfg.fractions = o.fractions;
  if (o.no_warm_start) cfg.warm_start = false;
  if (o.folds) cfg.folds = *o.folds;
  if (o.grid) cfg.bench.grid = parse_grid(*o.grid);
  if (o.repetitions) cfg.bench.repetitions = *o.repetitions;
  if (!o.variants.empty()) {
    cfg.bench.variants.clear();
    for (const auto& v : o.variants) cfg.bench.variants.push_back(parse_variant(v));
  }
  if (o.workers) cfg.bench.workers = *o.workers;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse logistic regression with proximal-gradient solvers"};
  app.require_subcommand(1);

  Overrides o;
  CLI::App* train = app.add_subcommand("train", "fit one model");
  CLI::App* path = app.add_subcommand("path", "solve a regularization path");
  CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation over the path");
  CLI::App* bench = app.add_subcommand("bench", "timing study on synthetic data");
  for (CLI::App* sub : {train, path, cv, bench}) add_common(sub, o);
  for (CLI::App* sub : {path, cv}) {
    sub->add_option("--fractions", o.fractions, "lambda/lambda_max values, increasing")
        ->delimiter(',');
    sub->add_flag("--no-warm-start", o.no_warm_start, "solve every point from beta0");
  }
  cv->add_option("--folds", o.folds, "number of folds");
  bench->add_option("--grid", o.grid, "NxD cells, e.g. 1000x500,1000x1000");
  bench->add_option("--repetitions", o.repetitions, "fits per cell; the median is reported");
  bench->add_option("--variants", o.variants, "variants to compare")->delimiter(',');
  bench->add_option("--workers", o.workers, "concurrent grid cells");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  RunConfig cfg;
  try {
    apply(o, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }

  if (app.got_subcommand(train)) return cmd_train(cfg, std::cout, std::cerr);
  if (app.got_subcommand(path)) return cmd_path(cfg, std::cout, std::cerr);
  if (app.got_subcommand(cv)) return cmd_cv(cfg, std::cout, std::cerr);
  return cmd_bench(cfg, std::cout, std::cerr);
}
