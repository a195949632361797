#ifndef NAGNTK_LAB_CONFIG_H_
#define NAGNTK_LAB_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nagntk/data.h"
#include "nagntk/ntk.h"

namespace nagntk::lab {

// Invalid or inconsistent experiment settings (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetSpec {
  // When set, features and labels come from this CSV; otherwise synthetic.
  std::optional<std::filesystem::path> csv;
  int label_column = -1;
  LabelMode label_mode = LabelMode::kClassification;
  double positive_class = 1.0;

  std::size_t n = 50;
  std::size_t d = 10;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  DatasetSpec data;
  std::vector<Method> methods{Method::kGD, Method::kHB, Method::kNAG};
  std::vector<std::size_t> widths{256, 1024, 4096, 16384};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t iterations = 500;
  std::size_t stride = 10;
  // Gram snapshots in the dynamics audit; psi_t needs H_t and H_{t-1}.
  std::size_t audit_stride = 1;
  LambdaConvention convention = LambdaConvention::kTable1;
  double threshold = 1e-3;  // iterations to loss_t <= threshold * loss_0
  std::size_t predictor_horizon = 100;
  std::filesystem::path output_dir = "out";
  // 0 means: NAGNTK_WORKERS if set, else hardware concurrency.
  std::size_t workers = 0;

  // Throws ConfigError.
  void validate() const;
};

Dataset load_dataset(const DatasetSpec& spec);

// Parse helpers shared by the command line front end.
LabelMode parse_label_mode(const std::string& s);
std::string to_string(LabelMode m);

}  // namespace nagntk::lab

#endif  // NAGNTK_LAB_CONFIG_H_
