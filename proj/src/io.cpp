#include "slr/io.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace slr {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// from_chars rejects a leading '+', which LIBSVM labels use routinely.
bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Accepts {0,1} and {-1,+1}; -1 maps to 0.
bool canonical_label(double raw, double& label) {
  if (raw == 1.0) {
    label = 1.0;
  } else if (raw == 0.0 || raw == -1.0) {
    label = 0.0;
  } else {
    return false;
  }
  return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

Dataset<double> load_csv(const std::filesystem::path& path,
                         const CsvOptions& options) {
  std::ifstream in = open_input(path);

  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t label_index = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::vector<double> cells;
    std::string_view rest(line);
    std::size_t col = 0;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      double value = 0.0;
      if (!parse_real(cell, value)) {
        throw DataError(fmt::format("{}: row {}, column {}: non-numeric cell '{}'",
                                    path.string(), line_no, col + 1, trim(cell)));
      }
      cells.push_back(value);
      ++col;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }

    if (rows.empty()) {
      width = cells.size();
      if (width < 2) {
        throw DataError(fmt::format("{}: row {}: need at least one feature and a label",
                                    path.string(), line_no));
      }
      const int lc = options.label_column;
      const long resolved = lc < 0 ? static_cast<long>(width) + lc : lc;
      if (resolved < 0 || resolved >= static_cast<long>(width)) {
        throw DataError(fmt::format("{}: label column {} out of range for {} columns",
                                    path.string(), lc, width));
      }
      label_index = static_cast<std::size_t>(resolved);
    } else if (cells.size() != width) {
      throw DataError(fmt::format("{}: row {}: ragged row with {} cells, expected {}",
                                  path.string(), line_no, cells.size(), width));
    }

    double label = 0.0;
    if (!canonical_label(cells[label_index], label)) {
      throw DataError(fmt::format("{}: row {}, column {}: label {} not in {{0,1}} or {{-1,+1}}",
                                  path.string(), line_no, label_index + 1,
                                  cells[label_index]));
    }
    cells[label_index] = label;
    rows.push_back(std::move(cells));
  }
  if (in.bad()) throw DataError("read failure on '" + path.string() + "'");
  if (rows.empty()) throw DataError("'" + path.string() + "' contains no samples");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  MatrixXd x(d, n);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == label_index) continue;
      x(j++, i) = r[c];
    }
    y(i) = r[label_index];
  }
  Dataset<double> data(std::move(x), std::move(y));
  return options.append_intercept ? data.with_intercept() : data;
}

Dataset<double> load_libsvm(const std::filesystem::path& path,
                            std::optional<Eigen::Index> n_features,
                            bool append_intercept) {
  std::ifstream in = open_input(path);

  struct Entry {
    Eigen::Index sample;
    Eigen::Index feature;
    double value;
  };
  std::vector<Entry> entries;
  std::vector<double> labels;
  Eigen::Index max_index = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
      rest = rest.substr(0, hash);
    }
    rest = trim(rest);
    if (rest.empty()) continue;

    const auto sample = static_cast<Eigen::Index>(labels.size());
    auto next_token = [&rest]() {
      rest = trim(rest);
      const auto space = rest.find_first_of(" \t");
      const std::string_view token = rest.substr(0, space);
      rest = space == std::string_view::npos ? std::string_view{} : rest.substr(space);
      return token;
    };

    const std::string_view label_token = next_token();
    double raw = 0.0;
    double label = 0.0;
    if (!parse_real(label_token, raw) || !canonical_label(raw, label)) {
      throw DataError(fmt::format("{}: line {}: label '{}' not in {{0,1,-1,+1}}",
                                  path.string(), line_no, label_token));
    }
    labels.push_back(label);

    Eigen::Index previous = 0;
    for (std::string_view token = next_token(); !token.empty(); token = next_token()) {
      const auto colon = token.find(':');
      long index = 0;
      double value = 0.0;
      bool ok = colon != std::string_view::npos;
      if (ok) {
        const std::string_view idx = token.substr(0, colon);
        const auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), index);
        ok = ec == std::errc() && ptr == idx.data() + idx.size() && index >= 1 &&
             parse_real(token.substr(colon + 1), value);
      }
      if (!ok) {
        throw DataError(fmt::format("{}: line {}: malformed pair '{}'", path.string(),
                                    line_no, token));
      }
      if (index <= previous) {
        throw DataError(fmt::format("{}: line {}: non-increasing index {} after {}",
                                    path.string(), line_no, index, previous));
      }
      previous = index;
      max_index = std::max<Eigen::Index>(max_index, index);
      entries.push_back({sample, index - 1, value});
    }
  }
  if (in.bad()) throw DataError("read failure on '" + path.string() + "'");
  if (labels.empty()) throw DataError("'" + path.string() + "' contains no samples");

  const Eigen::Index d = std::max(max_index, n_features.value_or(0));
  if (d < 1) throw DataError("'" + path.string() + "' has no features");
  MatrixXd x = MatrixXd::Zero(d, static_cast<Eigen::Index>(labels.size()));
  for (const Entry& e : entries) x(e.feature, e.sample) = e.value;
  VectorXd y = Eigen::Map<const VectorXd>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  Dataset<double> data(std::move(x), std::move(y));
  return append_intercept ? data.with_intercept() : data;
}

void write_libsvm(std::ostream& out, const Dataset<double>& data) {
  const MatrixXd& x = data.features();
  for (Eigen::Index i = 0; i < data.n_samples(); ++i) {
    fmt::print(out, "{}", data.labels()(i) == 1.0 ? 1 : 0);
    for (Eigen::Index j = 0; j < data.n_features(); ++j) {
      if (x(j, i) != 0.0) fmt::print(out, " {}:{:.17g}", j + 1, x(j, i));
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const Dataset<double>& data) {
  const MatrixXd& x = data.features();
  for (Eigen::Index i = 0; i < data.n_samples(); ++i) {
    for (Eigen::Index j = 0; j < data.n_features(); ++j) {
      fmt::print(out, "{:.17g},", x(j, i));
    }
    fmt::print(out, "{}\n", data.labels()(i) == 1.0 ? 1 : 0);
  }
}

}  // namespace slr
