#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "json.hpp"

namespace slr::cli {
namespace {

using nlohmann::ordered_json;

std::string real(double x) { return fmt::format("{:.17g}", x); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void prepare_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec || !std::filesystem::is_directory(cfg.out_dir)) {
    throw ConfigError("cannot create output directory '" + cfg.out_dir.string() + "'");
  }
}

ordered_json penalty_json(const Penalty<double>& pen) {
  ordered_json j;
  j["kind"] = to_string(pen.kind);
  j["lambda"] = pen.lambda;
  if (pen.kind == PenaltyKind::SCAD || pen.kind == PenaltyKind::MCP) j["theta"] = pen.theta;
  if (pen.kind == PenaltyKind::CappedL1) j["epsilon"] = pen.epsilon;
  return j;
}

void write_coefficients(const std::filesystem::path& path, const VectorXd& beta,
                        const Penalty<double>& pen, Variant variant) {
  ordered_json j;
  j["d"] = beta.size();
  j["lambda"] = pen.lambda;
  j["penalty"] = penalty_json(pen);
  j["variant"] = to_string(variant);
  ordered_json coef = ordered_json::object();
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (beta(i) != 0.0) coef[std::to_string(i)] = beta(i);
  }
  j["coefficients"] = std::move(coef);
  open_output(path) << j.dump(2) << '\n';
}

void write_trace(const std::filesystem::path& path, const Trace<double>& trace, int every) {
  std::ofstream out = open_output(path);
  out << "k,f,L_k,backtracks,nnz,time_s\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const bool last = i + 1 == trace.size();
    if (i % static_cast<std::size_t>(every) != 0 && !last) continue;
    const auto& r = trace[i];
    fmt::print(out, "{},{},{},{},{},{}\n", r.k, real(r.objective), real(r.L), r.backtracks,
               r.nnz, real(r.time_s));
  }
}

double resolve_lambda(const RunConfig& cfg, const Dataset<double>& data, double& lam_max) {
  if (cfg.penalty.lambda) {
    try {
      lam_max = lambda_max(data);
    } catch (const std::invalid_argument&) {
      lam_max = 0.0;
    }
    return *cfg.penalty.lambda;
  }
  lam_max = lambda_max(data);
  return cfg.penalty.lambda_frac * lam_max;
}

SolverOptions<double> solver_options(const RunConfig& cfg) {
  SolverOptions<double> opts = cfg.solver;
  opts.seed = cfg.seed;
  return opts;
}

PathSpec<double> path_spec(const RunConfig& cfg) {
  PathSpec<double> spec;
  spec.fractions = cfg.fractions;
  spec.warm_start = cfg.warm_start;
  spec.pen_template = cfg.penalty.make(1.0);
  if (cfg.penalty.kind == PenaltyKind::CappedL1 && !cfg.penalty.epsilon) spec.cap_ratio = 0.5;
  spec.opts = solver_options(cfg);
  return spec;
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

template <typename T>
T median(std::vector<T> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  if (values.size() % 2 == 1) return values[m];
  return (values[m - 1] + values[m]) / T(2);
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const Dataset<double> data = load_dataset(cfg);
    double lam_max = 0.0;
    const double lam = resolve_lambda(cfg, data, lam_max);
    const Penalty<double> pen = cfg.penalty.make(lam);
    const SolverOptions<double> opts = solver_options(cfg);
    const FitResult<double> result = fit(data, pen, opts);

    prepare_out_dir(cfg);
    write_coefficients(cfg.out_dir / "coefficients.json", result.beta, pen, opts.variant);
    write_trace(cfg.out_dir / "trace.csv", result.trace, cfg.trace_every);

    ordered_json summary;
    summary["variant"] = to_string(opts.variant);
    summary["criterion"] = to_string(opts.criterion);
    summary["penalty"] = penalty_json(pen);
    summary["lambda_max"] = lam_max;
    summary["n_samples"] = data.n_samples();
    summary["n_features"] = data.n_features();
    summary["lipschitz"] = result.lipschitz;
    summary["converged"] = result.converged;
    summary["iterations"] = result.iterations;
    summary["final_objective"] = result.final_objective;
    summary["nnz"] = count_nonzeros(result.beta);
    summary["seed"] = cfg.seed;
    summary["threads"] = 1;
    summary["time_s"] = result.trace.back().time_s;
    open_output(cfg.out_dir / "summary.json") << summary.dump(2) << '\n';

    fmt::print(log, "{} {}: {} after {} iterations, f = {}, nnz = {}\n", to_string(opts.variant),
               to_string(pen.kind), result.converged ? "converged" : "stopped at max_iters",
               result.iterations, real(result.final_objective), count_nonzeros(result.beta));
    return result.converged ? kExitOk : kExitNotConverged;
  });
}

int cmd_path(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const Dataset<double> data = load_dataset(cfg);
    const PathSpec<double> spec = path_spec(cfg);
    const auto points = run_path(data, spec);

    prepare_out_dir(cfg);
    std::ofstream out = open_output(cfg.out_dir / "path.csv");
    out << "fraction,lambda,final_objective,iterations,nnz,time_s\n";
    bool all_converged = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      all_converged = all_converged && p.fit.converged;
      fmt::print(out, "{},{},{},{},{},{}\n", real(p.fraction), real(p.lambda),
                 real(p.fit.final_objective), p.fit.iterations, p.nnz,
                 real(p.fit.trace.back().time_s));
      Penalty<double> pen = spec.pen_template;
      pen.lambda = p.lambda;
      if (spec.cap_ratio && pen.kind == PenaltyKind::CappedL1) pen.epsilon = *spec.cap_ratio * p.lambda;
      write_coefficients(cfg.out_dir / fmt::format("coef_{:02}.json", i), p.fit.beta, pen,
                         spec.opts.variant);
    }
    fmt::print(log, "path: {} points written to {}\n", points.size(), cfg.out_dir.string());
    return all_converged ? kExitOk : kExitNotConverged;
  });
}

int cmd_cv(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    const Dataset<double> data = load_dataset(cfg);
    const PathSpec<double> spec = path_spec(cfg);
    const CvReport report = cross_validate(data, spec, cfg.folds, cfg.seed);

    prepare_out_dir(cfg);
    std::ofstream cells = open_output(cfg.out_dir / "cv.csv");
    cells << "fraction,fold,accuracy,nnz,iterations,reason\n";
    for (const CvCell& c : report.cells) {
      if (c.accuracy) {
        fmt::print(cells, "{},{},{},{},{},\n", real(c.fraction), c.fold, real(*c.accuracy), c.nnz,
                   c.iterations);
      } else {
        fmt::print(cells, "{},{},,,,{}\n", real(c.fraction), c.fold, csv_safe(c.skip_reason));
      }
    }

    std::ofstream means = open_output(cfg.out_dir / "cv_means.csv");
    means << "fraction,mean_accuracy,folds_used\n";
    const std::size_t k = static_cast<std::size_t>(cfg.folds);
    for (std::size_t fi = 0; fi < report.fractions.size(); ++fi) {
      int used = 0;
      for (std::size_t f = 0; f < k; ++f) used += report.cells[fi * k + f].accuracy ? 1 : 0;
      const auto& m = report.mean_accuracy[fi];
      fmt::print(means, "{},{},{}\n", real(report.fractions[fi]), m ? real(*m) : "", used);
      fmt::print(log, "fraction {:<5} mean accuracy {}\n", report.fractions[fi],
                 m ? fmt::format("{:.4f}", *m) : "n/a");
    }
    return kExitOk;
  });
}

int cmd_bench(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    cfg.validate();
    cfg.bench.validate();
    const BenchSpec& bench = cfg.bench;

    struct Cell {
      Variant variant;
      Eigen::Index n, d;
      double median_time = 0.0;
      double median_iters = 0.0;
      std::string error;
    };
    std::vector<Cell> cells;
    for (const auto& [n, d] : bench.grid) {
      for (Variant v : bench.variants) cells.push_back({v, n, d, 0.0, 0.0, {}});
    }

    // Each cell runs start to finish on one worker, so its repetitions are
    // timed without sharing a thread.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) {
        Cell& cell = cells[i];
        try {
          SyntheticSpec syn;
          syn.n_samples = cell.n;
          syn.n_features = cell.d;
          syn.n_nonzero = bench.n_nonzero;
          syn.seed = cfg.seed;
          const auto problem = generate_synthetic<double>(syn);
          const double lam = bench.lambda_frac * lambda_max(problem.data);
          const Penalty<double> pen = cfg.penalty.make(lam);
          SolverOptions<double> opts = solver_options(cfg);
          opts.variant = cell.variant;
          std::vector<double> times;
          std::vector<double> iters;
          for (int r = 0; r < bench.repetitions; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            const FitResult<double> res = fit(problem.data, pen, opts);
            times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            iters.push_back(res.iterations);
          }
          cell.median_time = median(times);
          cell.median_iters = median(iters);
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
    };
    const int n_workers = std::min<int>(bench.workers, static_cast<int>(cells.size()));
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    }

    for (const Cell& c : cells) {
      if (!c.error.empty()) {
        throw std::runtime_error(fmt::format("bench cell {} n={} d={}: {}", to_string(c.variant),
                                             c.n, c.d, c.error));
      }
    }

    prepare_out_dir(cfg);
    std::ofstream out = open_output(cfg.out_dir / "bench.csv");
    out << "variant,n,d,median_time_s,median_iters\n";
    for (const Cell& c : cells) {
      fmt::print(out, "{},{},{},{},{}\n", to_string(c.variant), c.n, c.d, real(c.median_time),
                 real(c.median_iters));
      fmt::print(log, "{:<14} n={:<6} d={:<6} {:.4f} s  {} iterations\n", to_string(c.variant),
                 c.n, c.d, c.median_time, c.median_iters);
    }
    return kExitOk;
  });
}

}  // namespace slr::cli
