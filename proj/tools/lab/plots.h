#ifndef NAGNTK_LAB_PLOTS_H_
#define NAGNTK_LAB_PLOTS_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nagntk::lab {

// An input lacks a column the figure needs.
class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  // Optional shaded band, same length as x.
  std::vector<double> lo;
  std::vector<double> hi;
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  bool log_x = false;
  std::vector<Series> series;
};

// Self-contained SVG text. Non-positive values are dropped on log axes.
std::string render_svg(const Figure& fig);

// Writes <stem>.svg and <stem>.csv (series, x, y, lo, hi) into `dir`.
void write_figure(const std::filesystem::path& dir, const std::string& stem,
                  const Figure& fig);

// Renders every recognised CSV among `inputs` (files, or directories scanned
// for *.csv) into `out_dir`:
//   bands.csv        -> convergence.svg (mean curves with min/max bands)
//   sweep.csv        -> width_max_dist.svg, width_pattern_ratio.svg
//   trajectories.csv -> trajectories_max_dist.svg, trajectories_pattern_ratio.svg
//   predictor.csv    -> predictor.svg
//   decomposition.csv-> envelope.svg
//   trace_*.csv      -> <stem>_loss.svg
// Returns the images written. Throws PlotError on missing columns.
std::vector<std::filesystem::path> emit_plots(
    const std::vector<std::filesystem::path>& inputs,
    const std::filesystem::path& out_dir);

}  // namespace nagntk::lab

#endif  // NAGNTK_LAB_PLOTS_H_
