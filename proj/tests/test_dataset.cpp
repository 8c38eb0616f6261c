#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "slr/io.hpp"

using namespace slr;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents, const std::string& ext = ".txt") {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("slr_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ext);
    std::ofstream(path) << contents;
  }
  ~TempFile() { std::filesystem::remove(path); }
};

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("dataset rejects invalid contents") {
  MatrixXd x(2, 2);
  x << 1, 2, 3, 4;
  CHECK_THROWS_AS(Dataset<double>(x, VectorXd::Constant(2, 0.5)), DataError);
  CHECK_THROWS_AS(Dataset<double>(x, VectorXd::Zero(3)), DataError);
  x(0, 0) = std::nan("");
  CHECK_THROWS_AS(Dataset<double>(x, VectorXd::Zero(2)), DataError);
  CHECK_THROWS_AS(Dataset<double>(MatrixXd(0, 2), VectorXd::Zero(2)), DataError);
}

TEST_CASE("load_csv transposes rows into sample columns") {
  TempFile f("1.0,2.0,1\n0.5,1.5,0\n2.0,0.0,1\n");
  const auto data = load_csv(f.path, {.label_column = 2});
  REQUIRE(data.n_features() == 2);
  REQUIRE(data.n_samples() == 3);
  CHECK(data.labels() == VectorXd((VectorXd(3) << 1, 0, 1).finished()));
  CHECK(data.features()(0, 1) == 0.5);
  CHECK(data.features()(1, 0) == 2.0);
}

TEST_CASE("load_csv maps -1/+1 labels and handles header and intercept") {
  TempFile f("a,b,label\n1,2,-1\n3,4,+1\n");
  const auto data = load_csv(f.path, {.label_column = -1, .has_header = true, .append_intercept = true});
  CHECK(data.n_features() == 3);
  CHECK(data.labels()(0) == 0.0);
  CHECK(data.labels()(1) == 1.0);
  CHECK(data.features().row(2).sum() == 2.0);
}

TEST_CASE("load_csv errors carry the location") {
  TempFile ragged("1,2,1\n1,1\n3,4,0\n");
  CHECK(error_of([&] { load_csv(ragged.path); }).find("row 2") != std::string::npos);

  TempFile text("1,2,1\n1,x,0\n");
  const auto msg = error_of([&] { load_csv(text.path); });
  CHECK(msg.find("row 2, column 2") != std::string::npos);

  TempFile bad_label("1,2,2\n");
  CHECK(error_of([&] { load_csv(bad_label.path); }).find("label") != std::string::npos);

  CHECK(error_of([] { load_csv("/nonexistent/file.csv"); }).find("/nonexistent/file.csv") !=
        std::string::npos);
}

TEST_CASE("load_libsvm parses sparse rows") {
  TempFile a("+1 1:0.5 3:2.0\n");
  const auto da = load_libsvm(a.path);
  CHECK(da.n_features() == 3);
  CHECK(da.features().col(0) == VectorXd((VectorXd(3) << 0.5, 0, 2.0).finished()));
  CHECK(da.labels()(0) == 1.0);

  TempFile b("0 2:1.0\n");
  const auto db = load_libsvm(b.path, 4);
  CHECK(db.features().col(0) == VectorXd((VectorXd(4) << 0, 1, 0, 0).finished()));
  CHECK(db.labels()(0) == 0.0);

  TempFile c("1 3:1 2:1\n");
  CHECK(error_of([&] { load_libsvm(c.path); }).find("non-increasing") != std::string::npos);
  TempFile d("1 3-1\n");
  CHECK(error_of([&] { load_libsvm(d.path); }).find("malformed") != std::string::npos);
  TempFile e("2 1:1\n");
  CHECK(error_of([&] { load_libsvm(e.path); }).find("label") != std::string::npos);
}

TEST_CASE("libsvm round trip and csv/libsvm agreement") {
  const auto problem = generate_synthetic<double>({.n_samples = 40, .n_features = 7,
                                                   .n_nonzero = 3, .seed = 11});
  MatrixXd x = problem.data.features();
  x.row(6).setZero();  // trailing all-zero feature must survive via n_features
  x(2, 5) = 0.0;
  const Dataset<double> data(x, problem.data.labels());

  std::ostringstream svm;
  write_libsvm(svm, data);
  TempFile fsvm(svm.str());
  CHECK(load_libsvm(fsvm.path, data.n_features()) == data);

  std::ostringstream csv;
  write_csv(csv, data);
  TempFile fcsv(csv.str());
  CHECK(load_csv(fcsv.path) == load_libsvm(fsvm.path, data.n_features()));
}

TEST_CASE("generate_synthetic is deterministic and matches its spec") {
  const SyntheticSpec spec{.n_samples = 200, .n_features = 50, .n_nonzero = 5, .seed = 7};
  const auto a = generate_synthetic<double>(spec);
  const auto b = generate_synthetic<double>(spec);
  CHECK(a.data == b.data);
  CHECK(a.true_coefficients == b.true_coefficients);

  const double mean = a.data.labels().mean();
  CHECK(mean >= 0.2);
  CHECK(mean <= 0.8);
  for (Eigen::Index j = 0; j < 50; ++j) {
    const double m = std::abs(a.true_coefficients(j));
    if (j < 5) {
      CHECK(m >= 0.5);
      CHECK(m <= 1.5);
    } else {
      CHECK(m == 0.0);
    }
  }

  SyntheticSpec other = spec;
  other.seed = 8;
  CHECK_FALSE(generate_synthetic<double>(other).data == a.data);

  SyntheticSpec empty = spec;
  empty.n_nonzero = 0;
  empty.n_samples = 2000;
  const auto z = generate_synthetic<double>(empty);
  CHECK(z.true_coefficients.isZero());
  CHECK(std::abs(z.data.labels().mean() - 0.5) < 0.05);

  SyntheticSpec bad = spec;
  bad.n_nonzero = 51;
  CHECK_THROWS_AS(generate_synthetic<double>(bad), std::invalid_argument);
}

TEST_CASE("subset picks columns") {
  const auto data = oracle::random_dataset(3, 6, 1);
  const std::vector<Eigen::Index> idx{4, 1};
  const auto s = data.subset(idx);
  CHECK(s.n_samples() == 2);
  CHECK(s.features().col(0) == data.features().col(4));
  CHECK(s.labels()(1) == data.labels()(1));
}
