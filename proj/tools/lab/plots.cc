#include "lab/plots.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "nagntk/csv.h"

namespace nagntk::lab {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::fabs(v) >= 1e4 || std::fabs(v) < 1e-2)) {
    std::snprintf(buf, sizeof(buf), "%.0e", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%g", v);
  }
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;
  double hi = 1.0;

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double map(double v) const { return log ? std::log10(v) : v; }
  double frac(double v) const { return (map(v) - lo) / (hi - lo); }

  void fit(const std::vector<double>& values) {
    double a = std::numeric_limits<double>::infinity();
    double b = -a;
    for (double v : values) {
      if (!usable(v)) continue;
      a = std::min(a, map(v));
      b = std::max(b, map(v));
    }
    if (!std::isfinite(a)) {
      a = 0.0;
      b = 1.0;
    }
    if (b - a < 1e-12) {
      const double pad = log ? 0.5 : std::max(0.5 * std::fabs(a), 0.5);
      a -= pad;
      b += pad;
    }
    if (log) {
      a = std::floor(a);
      b = std::ceil(b);
    }
    lo = a;
    hi = b;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int n = static_cast<int>(hi - lo);
      const int step = std::max(1, n / 8);
      for (int k = static_cast<int>(lo); k <= static_cast<int>(hi); k += step)
        out.push_back(std::pow(10.0, k));
      return out;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
      step = f * mag;
      if (step >= raw) break;
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
      out.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

}  // namespace

std::string render_svg(const Figure& fig) {
  Axis ax{fig.log_x};
  Axis ay{fig.log_y};
  std::vector<double> xs, ys;
  for (const Series& s : fig.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
    ys.insert(ys.end(), s.lo.begin(), s.lo.end());
    ys.insert(ys.end(), s.hi.begin(), s.hi.end());
  }
  ax.fit(xs);
  ay.fit(ys);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + ax.frac(v) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - ay.frac(v)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(fig.title) << "</text>\n";

  for (double t : ax.ticks()) {
    const double x = px(t);
    o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x)
      << "\" y2=\"" << num(kTop + ph) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 16)
      << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = py(t);
    o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw)
      << "\" y2=\"" << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4)
      << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
    << "\" text-anchor=\"middle\">" << escape(fig.x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(fig.y_label) << "</text>\n";

  for (std::size_t k = 0; k < fig.series.size(); ++k) {
    const Series& s = fig.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    if (!s.lo.empty() && s.lo.size() == s.x.size() && s.hi.size() == s.x.size()) {
      std::string upper, lower;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ax.usable(s.x[i]) || !ay.usable(s.lo[i]) || !ay.usable(s.hi[i])) continue;
        upper += num(px(s.x[i])) + ',' + num(py(s.hi[i])) + ' ';
      }
      for (std::size_t i = s.x.size(); i-- > 0;) {
        if (!ax.usable(s.x[i]) || !ay.usable(s.lo[i]) || !ay.usable(s.hi[i])) continue;
        lower += num(px(s.x[i])) + ',' + num(py(s.lo[i])) + ' ';
      }
      o << "<polygon points=\"" << upper << lower << "\" fill=\"" << colour
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      pts += num(px(s.x[i])) + ',' + num(py(s.y[i])) + ' ';
    }
    o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << colour
      << "\" stroke-width=\"1.8\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
      << num(kLeft + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour
      << "\" stroke-width=\"2.5\"/>\n";
    o << "<text x=\"" << num(kLeft + pw + 42) << "\" y=\"" << num(ly + 4) << "\">"
      << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_figure(const fs::path& dir, const std::string& stem, const Figure& fig) {
  csv::write_text_atomic(dir / (stem + ".svg"), render_svg(fig));
  std::vector<std::vector<std::string>> rows;
  for (const Series& s : fig.series) {
    const bool band = s.lo.size() == s.x.size() && s.hi.size() == s.x.size();
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      rows.push_back({s.label, csv::format(s.x[i]), csv::format(s.y[i]),
                      band ? csv::format(s.lo[i]) : "", band ? csv::format(s.hi[i]) : ""});
    }
  }
  csv::write_atomic(dir / (stem + ".csv"), {"series", "x", "y", "lo", "hi"}, rows);
}

namespace {

class Columns {
 public:
  Columns(const fs::path& path, const csv::Table& table) : path_(path), table_(table) {}

  bool has(const std::string& name) const {
    return std::find(table_.header.begin(), table_.header.end(), name) != table_.header.end();
  }

  std::size_t index(const std::string& name) const {
    auto it = std::find(table_.header.begin(), table_.header.end(), name);
    if (it == table_.header.end()) {
      throw PlotError(path_.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - table_.header.begin());
  }

  double value(std::size_t row, std::size_t col) const {
    const auto& r = table_.rows[row];
    if (col >= r.size()) {
      throw PlotError(path_.string() + ": short row at line " +
                      std::to_string(table_.line_numbers[row]));
    }
    const auto v = csv::parse_double(r[col]);
    if (!v) {
      // Keep non-finite markers such as "nan" as gaps in the curve.
      return std::numeric_limits<double>::quiet_NaN();
    }
    return *v;
  }

  const std::string& text(std::size_t row, std::size_t col) const {
    const auto& r = table_.rows[row];
    if (col >= r.size()) {
      throw PlotError(path_.string() + ": short row at line " +
                      std::to_string(table_.line_numbers[row]));
    }
    return r[col];
  }

  std::size_t rows() const { return table_.rows.size(); }

 private:
  fs::path path_;
  const csv::Table& table_;
};

// Rows grouped by a key column, in order of first appearance.
std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by(
    const Columns& c, std::size_t key_col) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const std::string& key = c.text(r, key_col);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {r}});
    } else {
      it->second.push_back(r);
    }
  }
  return groups;
}

Figure convergence_figure(const Columns& c) {
  const std::size_t method = c.index("method"), t = c.index("t"), mean = c.index("mean"),
                    lo = c.index("min"), hi = c.index("max");
  Figure fig{"Training loss across seeds", "iteration t", "loss", true, false, {}};
  for (const auto& [name, rows] : group_by(c, method)) {
    Series s{name, {}, {}, {}, {}};
    for (std::size_t r : rows) {
      s.x.push_back(c.value(r, t));
      s.y.push_back(c.value(r, mean));
      s.lo.push_back(c.value(r, lo));
      s.hi.push_back(c.value(r, hi));
    }
    fig.series.push_back(std::move(s));
  }
  return fig;
}

Figure width_figure(const Columns& c, const std::string& column, const std::string& title,
                    bool log_y) {
  const std::size_t method = c.index("method"), width = c.index("width"),
                    col = c.index(column);
  Figure fig{title, "width m", column, log_y, true, {}};
  for (const auto& [name, rows] : group_by(c, method)) {
    Series s{name, {}, {}, {}, {}};
    for (std::size_t r : rows) {
      s.x.push_back(c.value(r, width));
      s.y.push_back(c.value(r, col));
    }
    fig.series.push_back(std::move(s));
  }
  return fig;
}

Figure trajectory_figure(const Columns& c, const std::string& column, const std::string& title) {
  const std::size_t method = c.index("method"), width = c.index("width"), t = c.index("t"),
                    col = c.index(column);
  Figure fig{title, "iteration t", column, false, false, {}};
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    const std::string key = c.text(r, method) + " m=" + c.text(r, width);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == key; });
    if (it == groups.end()) {
      groups.push_back({key, {r}});
    } else {
      it->second.push_back(r);
    }
  }
  for (const auto& [name, rows] : groups) {
    Series s{name, {}, {}, {}, {}};
    for (std::size_t r : rows) {
      s.x.push_back(c.value(r, t));
      s.y.push_back(c.value(r, col));
    }
    fig.series.push_back(std::move(s));
  }
  return fig;
}

Figure two_column_figure(const Columns& c, const std::string& title,
                         const std::vector<std::pair<std::string, std::string>>& cols,
                         const std::string& y_label) {
  const std::size_t t = c.index("t");
  Figure fig{title, "iteration t", y_label, true, false, {}};
  for (const auto& [column, label] : cols) {
    const std::size_t k = c.index(column);
    Series s{label, {}, {}, {}, {}};
    for (std::size_t r = 0; r < c.rows(); ++r) {
      s.x.push_back(c.value(r, t));
      s.y.push_back(c.value(r, k));
    }
    fig.series.push_back(std::move(s));
  }
  return fig;
}

std::vector<fs::path> expand(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const fs::path& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw PlotError("input not found: " + p.string());
    }
  }
  return files;
}

}  // namespace

std::vector<fs::path> emit_plots(const std::vector<fs::path>& inputs, const fs::path& out_dir) {
  std::vector<fs::path> written;
  auto emit = [&](const std::string& stem, const Figure& fig) {
    write_figure(out_dir, stem, fig);
    written.push_back(out_dir / (stem + ".svg"));
  };
  for (const fs::path& file : expand(inputs)) {
    const std::string name = file.filename().string();
    const std::string stem = file.stem().string();
    // Skip the *_loss.csv data files this function writes next to trace images.
    const bool is_trace = name.starts_with("trace_") && !name.ends_with("_loss.csv");
    const bool known = is_trace || name == "bands.csv" || name == "sweep.csv" ||
                       name == "trajectories.csv" || name == "predictor.csv" ||
                       name == "decomposition.csv";
    if (!known) continue;
    const csv::Table table = csv::read(file);
    const Columns c(file, table);
    if (name == "bands.csv") {
      emit("convergence", convergence_figure(c));
    } else if (name == "sweep.csv") {
      emit("width_max_dist",
           width_figure(c, "median_max_dist", "Final max distance vs width", true));
      emit("width_pattern_ratio",
           width_figure(c, "median_pattern_ratio", "Final activation pattern ratio vs width",
                        false));
    } else if (name == "trajectories.csv") {
      emit("trajectories_max_dist",
           trajectory_figure(c, "median_max_dist", "Max distance from initialization"));
      emit("trajectories_pattern_ratio",
           trajectory_figure(c, "median_pattern_ratio", "Activation pattern ratio"));
    } else if (name == "predictor.csv") {
      emit("predictor", two_column_figure(c, "Linear predictor vs measured",
                                          {{"predicted_norm", "predicted"},
                                           {"actual_norm", "measured"}},
                                          "||z_t||"));
    } else if (name == "decomposition.csv") {
      emit("envelope", two_column_figure(c, "Residual envelope",
                                         {{"envelope_bound", "bound"},
                                          {"envelope_value", "||z_t||"}},
                                         "norm"));
    } else {
      emit(stem + "_loss", two_column_figure(c, stem, {{"loss", "loss"}}, "loss"));
    }
  }
  return written;
}

}  // namespace nagntk::lab
