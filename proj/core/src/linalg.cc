#include "nagntk/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nagntk/errors.h"

namespace nagntk {

SymMatrix::SymMatrix(Matrix a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("symmetric matrix must be square, got " +
                         std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()));
  }
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::abs(a(i, j) - a(j, i));
      if (!(gap <= kSymmetryTolerance)) {
        throw SymmetryError("matrix not symmetric at (" + std::to_string(i) +
                            "," + std::to_string(j) + "): |a_ij - a_ji| = " +
                            std::to_string(gap));
      }
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  }
  a_ = std::move(a);
}

namespace {

double off_diagonal_mass(const Matrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Diagonalizes `a` in place; accumulates rotations into `v` when non-null.
void jacobi_sweeps(Matrix& a, Matrix* v, const JacobiOptions& opts) {
  const std::size_t n = a.rows();
  const double scale = fro_norm(a);
  if (scale == 0.0 || n < 2) return;
  const double target = opts.tolerance * scale;

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    if (off_diagonal_mass(a) <= target) return;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          const double nkp = akp - s * (akq + tau * akp);
          const double nkq = akq + s * (akp - tau * akq);
          a(k, p) = nkp;
          a(p, k) = nkp;
          a(k, q) = nkq;
          a(q, k) = nkq;
        }
        if (v != nullptr) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*v)(k, p);
            const double vkq = (*v)(k, q);
            (*v)(k, p) = vkp - s * (vkq + tau * vkp);
            (*v)(k, q) = vkq + s * (vkp - tau * vkq);
          }
        }
      }
    }
  }
  if (off_diagonal_mass(a) <= target) return;
  throw ConvergenceError("Jacobi eigensolver did not converge in " +
                         std::to_string(opts.max_sweeps) + " sweeps");
}

}  // namespace

Spectrum eig_sym(const SymMatrix& a, const JacobiOptions& opts) {
  Matrix work = a.matrix();
  jacobi_sweeps(work, nullptr, opts);
  Spectrum s;
  s.eigenvalues.resize(work.rows());
  for (std::size_t i = 0; i < work.rows(); ++i) s.eigenvalues[i] = work(i, i);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  return s;
}

Spectrum eig_sym(const Matrix& a, const JacobiOptions& opts) {
  return eig_sym(SymMatrix(a), opts);
}

EigenDecomposition eig_sym_vectors(const SymMatrix& a,
                                   const JacobiOptions& opts) {
  const std::size_t n = a.dim();
  Matrix work = a.matrix();
  Matrix v = Matrix::identity(n);
  jacobi_sweeps(work, &v, opts);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return work(x, x) < work(y, y);
  });

  EigenDecomposition out;
  out.spectrum.eigenvalues.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.spectrum.eigenvalues[k] = work(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::pair<std::complex<double>, std::complex<double>> eig_general_2x2(
    const Matrix& b) {
  if (b.rows() != 2 || b.cols() != 2) {
    throw DimensionError("eig_general_2x2 needs a 2x2 matrix");
  }
  const double tr = b(0, 0) + b(1, 1);
  const double det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
  // Discriminant from the entries avoids cancellation in tr^2 - 4 det.
  const double half_diff = 0.5 * (b(0, 0) - b(1, 1));
  const double disc4 = half_diff * half_diff + b(0, 1) * b(1, 0);
  const double half_tr = 0.5 * tr;
  if (disc4 >= 0.0) {
    const double root = std::sqrt(disc4);
    double z1 = half_tr + std::copysign(root, half_tr);
    double z2 = z1 != 0.0 ? det / z1 : half_tr - std::copysign(root, half_tr);
    if (z1 > z2) std::swap(z1, z2);
    return {std::complex<double>(z1, 0.0), std::complex<double>(z2, 0.0)};
  }
  const double im = std::sqrt(-disc4);
  return {std::complex<double>(half_tr, -im),
          std::complex<double>(half_tr, im)};
}

double fro_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: shape mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

double rayleigh(const SymMatrix& a, std::span<const double> u) {
  const Vector au = matvec(a.matrix(), u);
  return dot(u, au) / dot(u, u);
}

}  // namespace nagntk
