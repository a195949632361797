#include "nagntk/network.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>

#include "nagntk/errors.h"
#include "nagntk/linalg.h"
#include "nagntk/rng.h"

namespace nagntk {

namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

void require_dim(const NetworkState& s, const Matrix& x) {
  if (x.cols() != s.input_dim()) {
    throw DimensionError("feature dimension " + std::to_string(x.cols()) +
                         " does not match network input dimension " +
                         std::to_string(s.input_dim()));
  }
}

void require_dim(const NetworkState& s, const Dataset& ds) {
  require_dim(s, ds.features());
}

// Per-instance output sums, kept split so the residual can be formed
// without first rounding f to the grid around |y|:
// sqrt(m) f = base.sum + (base.carry + shift), where base collects the fixed
// <w0^r, x> parts and shift the small <d^r, x> parts.
struct OutputSum {
  CompensatedSum base;
  CompensatedSum shift;

  double value() const {
    const auto [hi, lo] = split();
    return hi + lo;
  }
  // scale * value() - y. The leading product is formed exactly by fma, so
  // the residual keeps its own relative precision instead of ulp(|y|).
  double minus(double scale, double y) const {
    const auto [hi, lo] = split();
    return std::fma(scale, hi, -y) + scale * lo;
  }

 private:
  // (hi, lo) with hi + lo = base + shift, hi from an exact TwoSum.
  std::pair<double, double> split() const {
    const double hi = base.sum + shift.sum;
    const double bb = hi - shift.sum;
    const double err = (base.sum - bb) + (shift.sum - (hi - bb));
    return {hi, err + (base.carry + shift.carry)};
  }
};

// Shared kernel: output sums and activation bits in one pass over (r, i).
std::vector<OutputSum> forward_pass(const NetworkState& s, const Matrix& x,
                                    PatternMatrix* patterns) {
  const std::size_t n = x.rows();
  const std::size_t m = s.width();
  const std::size_t d = s.input_dim();
  std::vector<OutputSum> acc(n);
  const Matrix& w0 = s.initial_weights();
  const Matrix& dw = s.displacement();
  for (std::size_t r = 0; r < m; ++r) {
    const double* w0r = w0.row(r).data();
    const double* dr = dw.row(r).data();
    const double ar = s.signs()[r];
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.row(i).data();
      double base = 0.0;
      double shift = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        base += w0r[k] * xi[k];
        shift += dr[k] * xi[k];
      }
      if (base + shift >= 0.0) {
        if (patterns != nullptr) patterns->set(i, r);
        acc[i].base.add(ar * base);
        acc[i].shift.add(ar * shift);
      }
    }
  }
  return acc;
}

double output_scale(std::size_t m) {
  return 1.0 / std::sqrt(static_cast<double>(m));
}

}  // namespace

NetworkState NetworkState::init(std::size_t width, std::size_t input_dim,
                                std::uint64_t seed) {
  if (width < 1 || input_dim < 1) {
    throw DimensionError("network needs width >= 1 and input_dim >= 1");
  }
  Rng weight_rng = Rng::stream(seed, 0x57);
  Rng sign_rng = Rng::stream(seed, 0xa5);
  Matrix w(width, input_dim);
  for (double& v : w.data()) v = weight_rng.normal();
  Vector a(width);
  for (double& v : a) v = sign_rng.rademacher();
  return NetworkState(std::move(w), std::move(a));
}

NetworkState::NetworkState(Matrix weights, Vector signs)
    : w0_(std::move(weights)), a_(std::move(signs)) {
  if (w0_.rows() == 0 || w0_.cols() == 0) {
    throw DimensionError("network needs width >= 1 and input_dim >= 1");
  }
  if (a_.size() != w0_.rows()) {
    throw DimensionError("output sign vector length does not match width");
  }
  for (double v : a_) {
    if (v != 1.0 && v != -1.0) throw Error("output signs must be +1 or -1");
  }
  d_ = Matrix(w0_.rows(), w0_.cols());
  dv_ = d_;
}

double NetworkState::preactivation(std::size_t r,
                                   std::span<const double> x) const {
  return dot(w0_.row(r), x) + dot(d_.row(r), x);
}

void NetworkState::set_weights(const Matrix& w) {
  if (w.rows() != w0_.rows() || w.cols() != w0_.cols()) {
    throw DimensionError("set_weights: shape mismatch");
  }
  d_ = w - w0_;
}

void NetworkState::set_aux(const Matrix& v) {
  if (v.rows() != w0_.rows() || v.cols() != w0_.cols()) {
    throw DimensionError("set_aux: shape mismatch");
  }
  dv_ = v - w0_;
}

Evaluation evaluate(const NetworkState& s, const Dataset& ds) {
  require_dim(s, ds);
  Evaluation ev;
  ev.patterns = PatternMatrix(ds.n(), s.width());
  const auto acc = forward_pass(s, ds.features(), &ev.patterns);
  const double scale = output_scale(s.width());
  ev.outputs.resize(ds.n());
  ev.residual.resize(ds.n());
  double sq = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    ev.outputs[i] = scale * acc[i].value();
    ev.residual[i] = acc[i].minus(scale, ds.labels()[i]);
    sq += ev.residual[i] * ev.residual[i];
  }
  ev.loss = 0.5 * sq;
  return ev;
}

Vector forward(const NetworkState& s, const Matrix& x) {
  require_dim(s, x);
  const auto acc = forward_pass(s, x, nullptr);
  const double scale = output_scale(s.width());
  Vector out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = scale * acc[i].value();
  return out;
}

PatternMatrix activation_patterns(const Matrix& weights, const Matrix& x) {
  if (weights.cols() != x.cols()) {
    throw DimensionError("activation_patterns: dimension mismatch");
  }
  PatternMatrix p(x.rows(), weights.rows());
  for (std::size_t r = 0; r < weights.rows(); ++r)
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (dot(weights.row(r), x.row(i)) >= 0.0) p.set(i, r);
  return p;
}

PatternMatrix activation_patterns(const NetworkState& s, const Matrix& x) {
  require_dim(s, x);
  PatternMatrix p(x.rows(), s.width());
  for (std::size_t r = 0; r < s.width(); ++r)
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (s.preactivation(r, x.row(i)) >= 0.0) p.set(i, r);
  return p;
}

double loss(const NetworkState& s, const Dataset& ds) {
  return evaluate(s, ds).loss;
}

Vector residual(const NetworkState& s, const Dataset& ds) {
  return evaluate(s, ds).residual;
}

Matrix gradient(const NetworkState& s, const Dataset& ds) {
  return gradient(s, ds, evaluate(s, ds));
}

Matrix gradient(const NetworkState& s, const Dataset& ds, const Evaluation& ev) {
  require_dim(s, ds);
  const std::size_t n = ds.n();
  const std::size_t m = s.width();
  const std::size_t d = s.input_dim();
  if (ev.residual.size() != n || ev.patterns.neurons() != m) {
    throw DimensionError("evaluation does not match state/dataset");
  }
  const double scale = output_scale(m);
  const Matrix& x = ds.features();
  Matrix g(m, d);
  for (std::size_t r = 0; r < m; ++r) {
    double* gr = g.row(r).data();
    for (std::size_t i = 0; i < n; ++i) {
      if (!ev.patterns.test(i, r)) continue;
      const double c = ev.residual[i];
      const double* xi = x.row(i).data();
      for (std::size_t k = 0; k < d; ++k) gr[k] += c * xi[k];
    }
    const double coef = scale * s.signs()[r];
    for (std::size_t k = 0; k < d; ++k) gr[k] *= coef;
  }
  return g;
}

double neuron_contribution(const NetworkState& s, std::size_t r,
                           std::span<const double> x) {
  if (x.size() != s.input_dim()) throw DimensionError("neuron_contribution: dimension mismatch");
  const double z = s.preactivation(r, x);
  const double relu = z >= 0.0 ? z : 0.0;
  return s.signs()[r] * relu / std::sqrt(static_cast<double>(s.width()));
}

namespace {

constexpr char kMagic[8] = {'N', 'A', 'G', 'N', 'T', 'K', '0', '2'};

void write_doubles(std::ofstream& out, std::span<const double> v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::span<double> v) {
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

}  // namespace

void save_state(const NetworkState& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t dims[2] = {s.width(), s.input_dim()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  write_doubles(out, s.signs());
  write_doubles(out, s.initial_weights().data());
  write_doubles(out, s.displacement().data());
  write_doubles(out, s.aux_displacement().data());
  if (!out) throw Error("write failed for " + path.string());
}

NetworkState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(path.string() + " is not a network checkpoint");
  }
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[0] == 0 || dims[1] == 0 || dims[0] > (1u << 30) ||
      dims[1] > (1u << 20)) {
    throw Error(path.string() + " has an invalid header");
  }
  NetworkState s;
  s.a_.resize(dims[0]);
  s.w0_ = Matrix(dims[0], dims[1]);
  s.d_ = Matrix(dims[0], dims[1]);
  s.dv_ = Matrix(dims[0], dims[1]);
  read_doubles(in, s.a_);
  read_doubles(in, s.w0_.data());
  read_doubles(in, s.d_.data());
  read_doubles(in, s.dv_.data());
  if (!in) throw Error(path.string() + " is truncated");
  return s;
}

}  // namespace nagntk
