#include "config.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include "json.hpp"

#include "slr/io.hpp"

namespace slr::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + where + "." + key + "': " + e.what());
  }
}

template <typename T>
void read(const json& obj, const char* key, std::optional<T>& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  T value{};
  read(obj, key, value, where);
  out = value;
}

}  // namespace

Penalty<double> PenaltyConfig::make(double lam) const {
  switch (kind) {
    case PenaltyKind::L1:
      return Penalty<double>::l1(lam);
    case PenaltyKind::SCAD:
      return Penalty<double>::scad(lam, theta.value_or(3.7));
    case PenaltyKind::MCP:
      return Penalty<double>::mcp(lam, theta.value_or(3.0));
    case PenaltyKind::CappedL1:
      return Penalty<double>::capped_l1(lam, epsilon.value_or(0.5 * lam));
  }
  throw ConfigError("unhandled penalty kind");
}

void BenchSpec::validate() const {
  if (grid.empty()) throw ConfigError("bench grid is empty");
  for (const auto& [n, d] : grid) {
    if (n < 1 || d < 1) throw ConfigError("bench grid sizes must be positive");
    if (n_nonzero > d) throw ConfigError("bench n_nonzero exceeds a grid feature count");
  }
  if (repetitions < 1) throw ConfigError("bench repetitions must be >= 1");
  if (variants.empty()) throw ConfigError("bench needs at least one variant");
  if (workers < 1) throw ConfigError("bench workers must be >= 1");
  if (!(lambda_frac > 0.0)) throw ConfigError("bench lambda_frac must be > 0");
}

void RunConfig::validate() const {
  if (penalty.lambda && !(*penalty.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (!(penalty.lambda_frac > 0.0)) throw ConfigError("lambda_frac must be > 0");
  if (folds < 2) throw ConfigError("cv folds must be >= 2");
  if (trace_every < 1) throw ConfigError("trace_every must be >= 1");
  try {
    solver.validate();
    // Validates theta/epsilon against the chosen kind.
    (void)penalty.make(1.0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

DataFormat parse_format(std::string_view name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "libsvm") return DataFormat::Libsvm;
  if (name == "synthetic") return DataFormat::Synthetic;
  throw ConfigError("unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(DataFormat f) {
  switch (f) {
    case DataFormat::Csv: return "csv";
    case DataFormat::Libsvm: return "libsvm";
    case DataFormat::Synthetic: return "synthetic";
  }
  return "?";
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> parse_grid(std::string_view text) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> grid;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view cell = text.substr(0, comma);
    const auto x = cell.find('x');
    long n = 0;
    long d = 0;
    bool ok = x != std::string_view::npos;
    if (ok) {
      const auto r1 = std::from_chars(cell.data(), cell.data() + x, n);
      const auto r2 = std::from_chars(cell.data() + x + 1, cell.data() + cell.size(), d);
      ok = r1.ec == std::errc() && r1.ptr == cell.data() + x && r2.ec == std::errc() &&
           r2.ptr == cell.data() + cell.size();
    }
    if (!ok) throw ConfigError("bad grid cell '" + std::string(cell) + "', expected NxD");
    grid.emplace_back(n, d);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return grid;
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config '" + file.string() + "'");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + file.string() + "': " + e.what());
  }
  reject_unknown(root, {"data", "penalty", "solver", "path", "cv", "bench", "output", "seed"},
                 "root");
  read(root, "seed", cfg.seed, "root");

  if (root.contains("data")) {
    const json& s = root.at("data");
    reject_unknown(s, {"path", "format", "label_column", "header", "intercept", "n_features",
                       "synthetic"},
                   "data");
    std::string format;
    read(s, "format", format, "data");
    if (!format.empty()) cfg.data.format = parse_format(format);
    std::string path;
    read(s, "path", path, "data");
    if (!path.empty()) {
      std::filesystem::path p(path);
      cfg.data.path = p.is_absolute() ? p : file.parent_path() / p;
    }
    read(s, "label_column", cfg.data.label_column, "data");
    read(s, "header", cfg.data.has_header, "data");
    read(s, "intercept", cfg.data.intercept, "data");
    read(s, "n_features", cfg.data.n_features, "data");
    if (s.contains("synthetic")) {
      const json& syn = s.at("synthetic");
      reject_unknown(syn, {"n_samples", "n_features", "n_nonzero", "noise_scale"},
                     "data.synthetic");
      read(syn, "n_samples", cfg.data.synthetic.n_samples, "data.synthetic");
      read(syn, "n_features", cfg.data.synthetic.n_features, "data.synthetic");
      read(syn, "n_nonzero", cfg.data.synthetic.n_nonzero, "data.synthetic");
      read(syn, "noise_scale", cfg.data.synthetic.noise_scale, "data.synthetic");
    }
  }

  if (root.contains("penalty")) {
    const json& s = root.at("penalty");
    reject_unknown(s, {"kind", "lambda", "lambda_frac", "theta", "epsilon"}, "penalty");
    std::string kind;
    read(s, "kind", kind, "penalty");
    if (!kind.empty()) cfg.penalty.kind = parse_penalty_kind(kind);
    read(s, "lambda", cfg.penalty.lambda, "penalty");
    read(s, "lambda_frac", cfg.penalty.lambda_frac, "penalty");
    read(s, "theta", cfg.penalty.theta, "penalty");
    read(s, "epsilon", cfg.penalty.epsilon, "penalty");
  }

  if (root.contains("solver")) {
    const json& s = root.at("solver");
    reject_unknown(s, {"variant", "criterion", "eta", "L0", "tol", "max_iters", "max_backtracks",
                       "max_expansions", "init"},
                   "solver");
    std::string name;
    read(s, "variant", name, "solver");
    if (!name.empty()) cfg.solver.variant = parse_variant(name);
    name.clear();
    read(s, "criterion", name, "solver");
    if (!name.empty()) cfg.solver.criterion = parse_criterion(name);
    name.clear();
    read(s, "init", name, "solver");
    if (!name.empty()) cfg.solver.init = parse_init_kind(name);
    read(s, "eta", cfg.solver.eta, "solver");
    read(s, "L0", cfg.solver.fixed_initial_L, "solver");
    read(s, "tol", cfg.solver.tol, "solver");
    read(s, "max_iters", cfg.solver.max_iters, "solver");
    read(s, "max_backtracks", cfg.solver.max_backtracks, "solver");
    read(s, "max_expansions", cfg.solver.max_expansions, "solver");
  }

  if (root.contains("path")) {
    const json& s = root.at("path");
    reject_unknown(s, {"fractions", "warm_start"}, "path");
    read(s, "fractions", cfg.fractions, "path");
    read(s, "warm_start", cfg.warm_start, "path");
  }

  if (root.contains("cv")) {
    const json& s = root.at("cv");
    reject_unknown(s, {"folds"}, "cv");
    read(s, "folds", cfg.folds, "cv");
  }

  if (root.contains("bench")) {
    const json& s = root.at("bench");
    reject_unknown(s, {"grid", "lambda_frac", "repetitions", "variants", "workers", "n_nonzero"},
                   "bench");
    std::vector<std::vector<Eigen::Index>> grid;
    read(s, "grid", grid, "bench");
    if (!grid.empty()) {
      cfg.bench.grid.clear();
      for (const auto& cell : grid) {
        if (cell.size() != 2) throw ConfigError("bench.grid cells must be [n_samples, n_features]");
        cfg.bench.grid.emplace_back(cell[0], cell[1]);
      }
    }
    read(s, "lambda_frac", cfg.bench.lambda_frac, "bench");
    read(s, "repetitions", cfg.bench.repetitions, "bench");
    read(s, "workers", cfg.bench.workers, "bench");
    read(s, "n_nonzero", cfg.bench.n_nonzero, "bench");
    std::vector<std::string> variants;
    read(s, "variants", variants, "bench");
    if (!variants.empty()) {
      cfg.bench.variants.clear();
      for (const auto& v : variants) cfg.bench.variants.push_back(parse_variant(v));
    }
  }

  if (root.contains("output")) {
    const json& s = root.at("output");
    reject_unknown(s, {"dir", "trace_every"}, "output");
    std::string dir;
    read(s, "dir", dir, "output");
    if (!dir.empty()) cfg.out_dir = dir;
    read(s, "trace_every", cfg.trace_every, "output");
  }
}

Dataset<double> load_dataset(const RunConfig& cfg) {
  const DataSource& src = cfg.data;
  switch (src.format) {
    case DataFormat::Synthetic: {
      SyntheticSpec spec = src.synthetic;
      spec.seed = cfg.seed;
      auto problem = generate_synthetic<double>(spec);
      return src.intercept ? problem.data.with_intercept() : problem.data;
    }
    case DataFormat::Csv:
    case DataFormat::Libsvm:
      if (src.path.empty()) throw ConfigError("no dataset path given (use --data)");
      if (!std::filesystem::exists(src.path)) {
        throw ConfigError("dataset file '" + src.path.string() + "' does not exist");
      }
      if (src.format == DataFormat::Csv) {
        return load_csv(src.path, {src.label_column, src.has_header, src.intercept});
      }
      return load_libsvm(src.path, src.n_features, src.intercept);
  }
  throw ConfigError("unhandled data format");
}

}  // namespace slr::cli
