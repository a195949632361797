#include "nagntk/data.h"

#include <cmath>
#include <string>
#include <utility>

#include "nagntk/csv.h"
#include "nagntk/errors.h"
#include "nagntk/linalg.h"
#include "nagntk/rng.h"

namespace nagntk {

namespace {

Matrix gram_of_rows(const Matrix& x) {
  Matrix g(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = i; j < x.rows(); ++j) {
      const double v = dot(x.row(i), x.row(j));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

}  // namespace

Dataset::Dataset(Matrix features, Vector labels, std::string name)
    : x_(std::move(features)), y_(std::move(labels)), name_(std::move(name)) {
  if (x_.rows() == 0 || x_.cols() == 0) {
    throw DimensionError("dataset needs n >= 1 and d >= 1");
  }
  if (y_.size() != x_.rows()) {
    throw DimensionError("dataset has " + std::to_string(x_.rows()) +
                         " feature rows but " + std::to_string(y_.size()) +
                         " labels");
  }
  for (std::size_t i = 0; i < x_.rows(); ++i) {
    const double norm = norm2(x_.row(i));
    if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
      throw NormalizationError("feature row " + std::to_string(i) +
                                   " has norm " + std::to_string(norm) +
                                   ", expected unit norm",
                               i);
    }
    if (!std::isfinite(y_[i])) {
      throw Error("label " + std::to_string(i) + " is not finite");
    }
  }
  validate_distinct(x_);
  gram_ = gram_of_rows(x_);
}

Matrix normalize_rows(Matrix x) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    const double norm = norm2(row);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NormalizationError(
          "feature row " + std::to_string(i) + " has zero or non-finite norm", i);
    }
    for (double& v : row) v /= norm;
  }
  return x;
}

void validate_distinct(const Matrix& x) {
  std::vector<std::pair<std::size_t, std::size_t>> dupes;
  const double tol2 = kDistinctTolerance * kDistinctTolerance;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i + 1; j < x.rows(); ++j)
      if (squared_distance(x.row(i), x.row(j)) <= tol2) dupes.emplace_back(i, j);
  if (dupes.empty()) return;
  std::string msg = "duplicate feature rows after normalization:";
  for (std::size_t k = 0; k < dupes.size() && k < 10; ++k) {
    msg += " (" + std::to_string(dupes[k].first) + "," +
           std::to_string(dupes[k].second) + ")";
  }
  if (dupes.size() > 10) msg += " ...";
  throw DistinctnessError(msg, std::move(dupes));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  const csv::Table table = csv::read(path);
  if (table.rows.empty()) throw ParseError("no data rows in " + path.string(), 0);

  const std::size_t arity = table.rows.front().size();
  if (arity < 2) throw ParseError("need at least one feature and a label", table.line_numbers[0]);
  const long label_col = opts.label_column < 0
                             ? static_cast<long>(arity) + opts.label_column
                             : opts.label_column;
  if (label_col < 0 || label_col >= static_cast<long>(arity)) {
    throw ParseError("label column " + std::to_string(opts.label_column) +
                         " out of range for " + std::to_string(arity) + " columns",
                     table.line_numbers[0]);
  }

  const std::size_t n = table.rows.size();
  Matrix x(n, arity - 1);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& fields = table.rows[i];
    const std::size_t line = table.line_numbers[i];
    if (fields.size() != arity) {
      throw ParseError("expected " + std::to_string(arity) + " fields, got " +
                           std::to_string(fields.size()),
                       line);
    }
    std::size_t col = 0;
    for (std::size_t k = 0; k < arity; ++k) {
      const auto v = csv::parse_double(fields[k]);
      if (!v) throw ParseError("unparseable field '" + fields[k] + "'", line);
      if (static_cast<long>(k) == label_col) {
        y[i] = *v;
      } else {
        x(i, col++) = *v;
      }
    }
  }

  switch (opts.mode) {
    case LabelMode::kClassification:
      for (double& v : y) v = (v == opts.positive_class) ? 1.0 : -1.0;
      break;
    case LabelMode::kRegression: {
      double mean = 0.0;
      for (double v : y) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : y) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n);
      if (!(var > 0.0)) throw Error("regression labels are constant; cannot standardize");
      const double sd = std::sqrt(var);
      for (double& v : y) v = (v - mean) / sd;
      break;
    }
    case LabelMode::kRaw:
      break;
  }

  Matrix normalized;
  try {
    normalized = normalize_rows(std::move(x));
  } catch (const NormalizationError& e) {
    throw NormalizationError(std::string(e.what()) + " (line " +
                                 std::to_string(table.line_numbers[e.row()]) + ")",
                             e.row());
  }
  return Dataset(std::move(normalized), std::move(y), path.stem().string());
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::vector<std::string> header;
  for (std::size_t k = 0; k < ds.d(); ++k) header.push_back("x" + std::to_string(k));
  header.push_back("y");
  std::vector<std::vector<std::string>> rows;
  rows.reserve(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    std::vector<std::string> r;
    for (double v : ds.features().row(i)) r.push_back(csv::format(v));
    r.push_back(csv::format(ds.labels()[i]));
    rows.push_back(std::move(r));
  }
  csv::write_atomic(path, header, rows);
}

Dataset synthetic(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < 1 || d < 2) throw DimensionError("synthetic needs n >= 1 and d >= 2");
  Rng feature_rng = Rng::stream(seed, 0);
  Rng label_rng = Rng::stream(seed, 1);
  Matrix x(n, d);
  const double tol2 = kDistinctTolerance * kDistinctTolerance;
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      auto row = x.row(i);
      for (double& v : row) v = feature_rng.normal();
      const double norm = norm2(row);
      if (!(norm > 0.0)) continue;
      for (double& v : row) v /= norm;
      bool clash = false;
      for (std::size_t j = 0; j < i && !clash; ++j)
        clash = squared_distance(x.row(i), x.row(j)) <= tol2;
      if (!clash) break;
    }
  }
  Vector y(n);
  for (double& v : y) v = label_rng.rademacher();
  return Dataset(std::move(x), std::move(y),
                 "synthetic_n" + std::to_string(n) + "_d" + std::to_string(d) +
                     "_s" + std::to_string(seed));
}

}  // namespace nagntk
