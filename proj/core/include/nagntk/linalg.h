#ifndef NAGNTK_LINALG_H_
#define NAGNTK_LINALG_H_

#include <complex>
#include <cstddef>
#include <span>
#include <utility>

#include "nagntk/matrix.h"

namespace nagntk {

inline constexpr double kSymmetryTolerance = 1e-12;

// A square matrix known to be symmetric. Construction rejects inputs whose
// entries differ from their transpose by more than kSymmetryTolerance and
// stores the average of the input and its transpose.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix a);

  std::size_t dim() const { return a_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

// Eigenvalues sorted ascending.
struct Spectrum {
  Vector eigenvalues;

  std::size_t dim() const { return eigenvalues.size(); }
  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

struct EigenDecomposition {
  Spectrum spectrum;
  // Column k is the unit eigenvector for spectrum.eigenvalues[k].
  Matrix vectors;
};

struct JacobiOptions {
  // Stop once the off-diagonal Frobenius mass is below tol * ||A||_F.
  double tolerance = 1e-12;
  int max_sweeps = 100;
};

// Cyclic Jacobi eigensolver. Throws ConvergenceError if max_sweeps is hit.
Spectrum eig_sym(const SymMatrix& a, const JacobiOptions& opts = {});
Spectrum eig_sym(const Matrix& a, const JacobiOptions& opts = {});
EigenDecomposition eig_sym_vectors(const SymMatrix& a,
                                   const JacobiOptions& opts = {});

// Roots of the characteristic polynomial z^2 - tr(B) z + det(B), ordered by
// (real, imag) ascending.
std::pair<std::complex<double>, std::complex<double>> eig_general_2x2(
    const Matrix& b);

double fro_norm(const Matrix& a);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
Vector matvec(const Matrix& a, std::span<const double> x);
Matrix matmul(const Matrix& a, const Matrix& b);
double rayleigh(const SymMatrix& a, std::span<const double> u);

}  // namespace nagntk

#endif  // NAGNTK_LINALG_H_
