#ifndef NAGNTK_DATA_H_
#define NAGNTK_DATA_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "nagntk/matrix.h"

namespace nagntk {

inline constexpr double kUnitNormTolerance = 1e-9;
inline constexpr double kDistinctTolerance = 1e-9;

// Training set with unit-norm, pairwise-distinct feature rows. Immutable once
// built; the constructor validates every invariant.
class Dataset {
 public:
  Dataset(Matrix features, Vector labels, std::string name = {});

  std::size_t n() const { return x_.rows(); }
  std::size_t d() const { return x_.cols(); }
  const Matrix& features() const { return x_; }
  const Vector& labels() const { return y_; }
  const std::string& name() const { return name_; }

  // Gram matrix of the features, <x_i, x_j>.
  const Matrix& inner_products() const { return gram_; }

 private:
  Matrix x_;
  Vector y_;
  std::string name_;
  Matrix gram_;
};

// Scales each row to unit l2 norm. Throws NormalizationError on a zero row.
Matrix normalize_rows(Matrix x);

// Throws DistinctnessError listing every pair closer than kDistinctTolerance.
void validate_distinct(const Matrix& x);

enum class LabelMode {
  kClassification,  // +1 for positive_class, -1 otherwise
  kRegression,      // standardized to zero mean, unit variance
  kRaw,             // passed through unchanged
};

struct CsvOptions {
  // Column holding the label; negative counts from the end (-1 = last).
  int label_column = -1;
  LabelMode mode = LabelMode::kRaw;
  double positive_class = 1.0;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts);
// Writes header x0..x{d-1},y then one row per sample, round-trip precision.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

// n points drawn from N(0, I_d) and projected onto the unit sphere, labels
// uniform on {+1, -1}. Deterministic for fixed (n, d, seed).
Dataset synthetic(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace nagntk

#endif  // NAGNTK_DATA_H_
