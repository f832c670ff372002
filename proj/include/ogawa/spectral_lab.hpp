#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <vector>

#include "ogawa/grid.hpp"
#include "ogawa/vector_fields.hpp"

namespace ogawa {

/// The symmetric matrix A with <DG eta, DG gamma> = int eta(t)^T A gamma(t) dt
/// for a linear field. Eigenvalues are sorted a1 >= a2 >= 0.
struct QuadraticFormMatrix {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;
  std::array<double, 2> eigenvalues{};
  std::array<std::array<double, 2>, 2> eigenvectors{};  // eigenvectors[j] = u_{j+1}
};

QuadraticFormMatrix matrix_A(const LinearField& field);

/// lambda_{n,j} = 4 a / (pi^2 (1 + 2n)^2).
double closed_form_eigenvalue(double a, std::size_t n);

struct ClosedFormEigenpair {
  std::size_t n = 0;
  std::size_t j = 1;  // 1 or 2
  double lambda = 0.0;
  std::array<double, 2> direction{};  // u_j

  /// gamma_{n,j}(t) = sin((pi/2 + n pi) t) u_j.
  std::array<double, 2> eigenfunction(double t) const;
};

/// Pairs (n, j) for n = 0..count-1 and j = 1, 2, n-major.
std::vector<ClosedFormEigenpair> closed_form_spectrum(const QuadraticFormMatrix& a,
                                                      std::size_t count);

enum class SpectralSolver {
  Dense,        // dense symmetric eigensolve of the discretized operator
  Tridiagonal,  // the same matrix through its tridiagonal inverse
};

/// Top eigenpairs of the scalar operator (K gamma)(t) = int_0^1 min(t, r) gamma(r) dr,
/// discretized by trapezoidal Nystrom on grid nodes t_1..t_N and symmetrized
/// with the square roots of the quadrature weights.
struct ScalarSpectrum {
  std::vector<double> eigenvalues;  // descending
  /// Eigenfunction values on all grid nodes (t_0 included), unit L^2 norm.
  std::vector<std::vector<double>> eigenfunctions;
  /// Trace of the discretized operator: matrix diagonal for the dense route,
  /// sum of all computed eigenvalues for the tridiagonal route.
  double trace = 0.0;
};

ScalarSpectrum min_kernel_spectrum(const TimeGrid& grid, std::size_t count,
                                   SpectralSolver solver = SpectralSolver::Dense);

struct SpectrumRow {
  std::size_t n = 0;
  std::size_t j = 1;
  double closed = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;  // absolute error when closed == 0
};

struct SpectrumReport {
  QuadraticFormMatrix matrix;
  std::vector<SpectrumRow> rows;
  /// Sum of all eigenvalues of the discretized L.
  double numeric_trace = 0.0;
};

/// Spectrum of L = DG^* DG: A is diagonalized first and each a_j scales the
/// scalar min-kernel spectrum.
SpectrumReport discretized_L_spectrum(const LinearField& field, const TimeGrid& grid,
                                      std::size_t count,
                                      SpectralSolver solver = SpectralSolver::Dense);

/// CSV `n,j,lambda_closed,lambda_numeric,rel_err`.
void write_spectrum_csv(const SpectrumReport& report, std::ostream& out);

/// S_N = sum_{n<N} sum_j sqrt(lambda_{n,j}) for N = 1..count.
std::vector<double> trace_class_diagnostic(const QuadraticFormMatrix& a, std::size_t count);
/// sum_{n<N} sum_j lambda_{n,j} for N = 1..count.
std::vector<double> hilbert_schmidt_partial_sums(const QuadraticFormMatrix& a,
                                                 std::size_t count);

}  // namespace ogawa
