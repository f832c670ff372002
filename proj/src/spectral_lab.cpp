#include "ogawa/spectral_lab.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ogawa {
namespace {

double quadrature_weight(std::size_t k, const TimeGrid& grid) {
  // Nodes t_1..t_N; t_0 carries no mass because min(0, r) = 0.
  return k == grid.num_steps() ? 0.5 * grid.step() : grid.step();
}

// Converts weighted eigenvector coordinates back to node values with unit
// L^2 norm, sign fixed by a positive value at t_1.
std::vector<double> to_eigenfunction(const double* v, const TimeGrid& grid) {
  const std::size_t n = grid.num_steps();
  std::vector<double> f(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) f[k] = v[k - 1] / std::sqrt(quadrature_weight(k, grid));
  std::vector<double> sq(n + 1);
  for (std::size_t k = 0; k <= n; ++k) sq[k] = f[k] * f[k];
  const double norm = std::sqrt(trapezoid(sq, grid.step()));
  const double sign = f[1] < 0.0 ? -1.0 : 1.0;
  for (auto& x : f) x *= sign / norm;
  return f;
}

ScalarSpectrum dense_spectrum(const TimeGrid& grid, std::size_t count) {
  const auto n = static_cast<lapack_int>(grid.num_steps());
  Eigen::MatrixXd s(n, n);
  double trace = 0.0;
  for (lapack_int l = 0; l < n; ++l) {
    const double wl = std::sqrt(quadrature_weight(static_cast<std::size_t>(l) + 1, grid));
    for (lapack_int k = 0; k < n; ++k) {
      const double wk = std::sqrt(quadrature_weight(static_cast<std::size_t>(k) + 1, grid));
      s(k, l) = wk * grid.time(static_cast<std::size_t>(std::min(k, l)) + 1) * wl;
    }
    trace += s(l, l);
  }
  const auto c = static_cast<lapack_int>(count);
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXd z(n, c);
  std::vector<lapack_int> support(2 * count);
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, s.data(), n, 0.0, 0.0, n - c + 1, n, 0.0,
                     &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != c) {
    throw std::runtime_error("min_kernel_spectrum: dsyevr failed (info " + std::to_string(info) + ")");
  }
  ScalarSpectrum out;
  out.trace = trace;
  for (lapack_int i = c - 1; i >= 0; --i) {
    out.eigenvalues.push_back(w[static_cast<std::size_t>(i)]);
    out.eigenfunctions.push_back(to_eigenfunction(z.col(i).data(), grid));
  }
  return out;
}

ScalarSpectrum tridiagonal_spectrum(const TimeGrid& grid, std::size_t count) {
  // The inverse of h * min(k, l) is tridiag(-1, 2, -1) / h with a 1 in the
  // last diagonal slot; conjugating by the weights keeps it tridiagonal.
  const std::size_t n = grid.num_steps();
  const double h = grid.step();
  std::vector<double> diag(n);
  std::vector<double> off(n > 1 ? n - 1 : 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double wk = quadrature_weight(k, grid);
    diag[k - 1] = (k == n ? 1.0 : 2.0) / (h * wk);
    if (k < n) off[k - 1] = -1.0 / (h * std::sqrt(wk * quadrature_weight(k + 1, grid)));
  }
  // Trace as the sum over the full computed spectrum.
  std::vector<double> all_diag = diag;
  std::vector<double> all_off = off;
  const lapack_int all_info =
      LAPACKE_dsterf(static_cast<lapack_int>(n), all_diag.data(), all_off.data());
  if (all_info != 0) {
    throw std::runtime_error("min_kernel_spectrum: dsterf failed (info " + std::to_string(all_info) + ")");
  }
  double trace = 0.0;
  for (auto it = all_diag.rbegin(); it != all_diag.rend(); ++it) trace += 1.0 / *it;
  const auto ln = static_cast<lapack_int>(n);
  const auto c = static_cast<lapack_int>(count);
  std::vector<double> w(n);
  std::vector<double> z(n * count);
  std::vector<lapack_int> support(2 * count);
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', ln, diag.data(), off.data(),
                                         0.0, 0.0, 1, c, 0.0, &found, w.data(), z.data(), ln,
                                         support.data());
  if (info != 0 || found != c) {
    throw std::runtime_error("min_kernel_spectrum: dstevr failed (info " + std::to_string(info) + ")");
  }
  ScalarSpectrum out;
  out.trace = trace;
  for (std::size_t i = 0; i < count; ++i) {
    out.eigenvalues.push_back(1.0 / w[i]);
    out.eigenfunctions.push_back(to_eigenfunction(z.data() + i * n, grid));
  }
  return out;
}

}  // namespace

QuadraticFormMatrix matrix_A(const LinearField& f) {
  QuadraticFormMatrix a;
  a.a11 = f.h1 * f.h1 + f.h2 * f.h2;
  a.a12 = f.h1 * f.k1 + f.h2 * f.k2;
  a.a22 = f.k1 * f.k1 + f.k2 * f.k2;
  const double mean = 0.5 * (a.a11 + a.a22);
  const double radius = std::hypot(0.5 * (a.a11 - a.a22), a.a12);
  a.eigenvalues = {mean + radius, std::max(0.0, mean - radius)};
  std::array<double, 2> u1{1.0, 0.0};
  if (a.a12 != 0.0) {
    u1 = {a.eigenvalues[0] - a.a22, a.a12};
    const double norm = std::hypot(u1[0], u1[1]);
    u1 = {u1[0] / norm, u1[1] / norm};
  } else if (a.a22 > a.a11) {
    u1 = {0.0, 1.0};
  }
  a.eigenvectors = {u1, std::array<double, 2>{-u1[1], u1[0]}};
  return a;
}

double closed_form_eigenvalue(double a, std::size_t n) {
  const double odd = 1.0 + 2.0 * static_cast<double>(n);
  return 4.0 * a / (std::numbers::pi * std::numbers::pi * odd * odd);
}

std::array<double, 2> ClosedFormEigenpair::eigenfunction(double t) const {
  const double s = std::sin((0.5 + static_cast<double>(n)) * std::numbers::pi * t);
  return {s * direction[0], s * direction[1]};
}

std::vector<ClosedFormEigenpair> closed_form_spectrum(const QuadraticFormMatrix& a,
                                                      std::size_t count) {
  if (count == 0) throw std::invalid_argument("closed_form_spectrum: count must be >= 1");
  std::vector<ClosedFormEigenpair> out;
  out.reserve(2 * count);
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t j = 0; j < 2; ++j) {
      out.push_back({n, j + 1, closed_form_eigenvalue(a.eigenvalues[j], n), a.eigenvectors[j]});
    }
  }
  return out;
}

ScalarSpectrum min_kernel_spectrum(const TimeGrid& grid, std::size_t count,
                                   SpectralSolver solver) {
  if (count == 0) throw std::invalid_argument("min_kernel_spectrum: count must be >= 1");
  if (count > grid.num_steps()) {
    throw std::invalid_argument("min_kernel_spectrum: count " + std::to_string(count) +
                                " exceeds the rank " + std::to_string(grid.num_steps()) +
                                " of the discretization");
  }
  return solver == SpectralSolver::Dense ? dense_spectrum(grid, count)
                                         : tridiagonal_spectrum(grid, count);
}

SpectrumReport discretized_L_spectrum(const LinearField& field, const TimeGrid& grid,
                                      std::size_t count, SpectralSolver solver) {
  SpectrumReport report;
  report.matrix = matrix_A(field);
  const ScalarSpectrum scalar = min_kernel_spectrum(grid, count, solver);
  const auto& a = report.matrix.eigenvalues;
  report.numeric_trace = (a[0] + a[1]) * scalar.trace;
  for (std::size_t n = 0; n < count; ++n) {
    for (std::size_t j = 0; j < 2; ++j) {
      SpectrumRow row;
      row.n = n;
      row.j = j + 1;
      row.closed = closed_form_eigenvalue(a[j], n);
      row.numeric = a[j] * scalar.eigenvalues[n];
      const double err = std::abs(row.numeric - row.closed);
      row.rel_err = row.closed > 0.0 ? err / row.closed : err;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_spectrum_csv(const SpectrumReport& report, std::ostream& out) {
  out << "n,j,lambda_closed,lambda_numeric,rel_err\n" << std::setprecision(17);
  for (const auto& r : report.rows) {
    out << r.n << ',' << r.j << ',' << r.closed << ',' << r.numeric << ',' << r.rel_err << '\n';
  }
}

std::vector<double> trace_class_diagnostic(const QuadraticFormMatrix& a, std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  double sum = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    sum += std::sqrt(closed_form_eigenvalue(a.eigenvalues[0], n)) +
           std::sqrt(closed_form_eigenvalue(a.eigenvalues[1], n));
    out.push_back(sum);
  }
  return out;
}

std::vector<double> hilbert_schmidt_partial_sums(const QuadraticFormMatrix& a,
                                                 std::size_t count) {
  std::vector<double> out;
  out.reserve(count);
  double sum = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    sum += closed_form_eigenvalue(a.eigenvalues[0], n) + closed_form_eigenvalue(a.eigenvalues[1], n);
    out.push_back(sum);
  }
  return out;
}

}  // namespace ogawa
