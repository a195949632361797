#include "lab/config.h"

#include <algorithm>
#include <cctype>

namespace nagntk::lab {

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (widths.empty()) throw ConfigError("at least one width is required");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (audit_stride < 1) throw ConfigError("audit stride must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("threshold must lie in (0, 1)");
  }
  for (std::size_t w : widths)
    if (w < 1) throw ConfigError("widths must be >= 1");
  if (!data.csv) {
    if (data.n < 1) throw ConfigError("synthetic n must be >= 1");
    if (data.d < 2) throw ConfigError("synthetic d must be >= 2");
  } else if (!std::filesystem::exists(*data.csv)) {
    throw ConfigError("dataset file not found: " + data.csv->string());
  }
}

Dataset load_dataset(const DatasetSpec& spec) {
  if (!spec.csv) return synthetic(spec.n, spec.d, spec.seed);
  CsvOptions opts;
  opts.label_column = spec.label_column;
  opts.mode = spec.label_mode;
  opts.positive_class = spec.positive_class;
  return load_csv(*spec.csv, opts);
}

LabelMode parse_label_mode(const std::string& s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (u == "classification") return LabelMode::kClassification;
  if (u == "regression") return LabelMode::kRegression;
  if (u == "raw") return LabelMode::kRaw;
  throw ConfigError("unknown label mode '" + s +
                    "' (expected classification, regression or raw)");
}

std::string to_string(LabelMode m) {
  switch (m) {
    case LabelMode::kClassification: return "classification";
    case LabelMode::kRegression: return "regression";
    case LabelMode::kRaw: return "raw";
  }
  return "?";
}

}  // namespace nagntk::lab
