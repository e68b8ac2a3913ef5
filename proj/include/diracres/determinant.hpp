#pragma once

// Dense determinant and norm utilities.  Determinants are carried as
// (log|det|, arg det) because |det| spans hundreds of orders of magnitude
// across the energy plane.

#include <cmath>
#include <vector>

#include <lapacke.h>

#include "diracres/common.hpp"

// OpenBLAS supplies the reference BLAS symbol; declared here to route large
// dense products through it instead of Eigen's slower product kernel.
extern "C" void zgemm_(const char* transa, const char* transb, const int* m,
                       const int* n, const int* k, const void* alpha,
                       const void* a, const int* lda, const void* b,
                       const int* ldb, const void* beta, void* c,
                       const int* ldc);

namespace diracres {

// C = alpha * op(A) * op(B) + beta * C on column-major storage; op is
// identity ('N'), transpose ('T'), or conjugate transpose ('C').
inline void blas_gemm(char trans_a, char trans_b, Complex alpha, const CMat& a,
                      const CMat& b, Complex beta, CMat& c) {
  const int m = static_cast<int>(c.rows());
  const int n = static_cast<int>(c.cols());
  const int k =
      static_cast<int>(trans_a == 'N' ? a.cols() : a.rows());
  const int lda = static_cast<int>(a.rows());
  const int ldb = static_cast<int>(b.rows());
  const int ldc = static_cast<int>(c.rows());
  zgemm_(&trans_a, &trans_b, &m, &n, &k, &alpha, a.data(), &lda, b.data(),
         &ldb, &beta, c.data(), &ldc);
}

struct LogDet {
  double log_abs = 0.0;
  double arg = 0.0;  // in (-pi, pi] + multiples of pi from pivoting sign
  Complex value() const { return std::exp(Complex(log_abs, arg)); }
};

// LU with partial pivoting (zgetrf); destroys its copy of the input.
inline LogDet logdet_lu(CMat m) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (n == 0) return {};
  std::vector<lapack_int> ipiv(n);
  const lapack_int info = LAPACKE_zgetrf(
      LAPACK_COL_MAJOR, n, n,
      reinterpret_cast<lapack_complex_double*>(m.data()), n, ipiv.data());
  if (info < 0) throw NumericalError("logdet_lu: bad argument to zgetrf");
  LogDet out;
  if (info > 0) {  // exactly singular at working precision
    out.log_abs = -std::numeric_limits<double>::infinity();
    return out;
  }
  int swaps = 0;
  for (lapack_int i = 0; i < n; ++i)
    if (ipiv[i] != i + 1) ++swaps;
  double arg = (swaps % 2) ? pi : 0.0;
  double log_abs = 0.0;
  for (lapack_int i = 0; i < n; ++i) {
    const Complex u = m(i, i);
    log_abs += std::log(std::abs(u));
    arg += std::arg(u);
  }
  out.log_abs = log_abs;
  out.arg = std::remainder(arg, 2.0 * pi);
  return out;
}

// Largest singular value by power iteration on A^H A with a fixed
// deterministic start vector.
inline double operator_norm_dense(const CMat& a, double rel_tol = 1e-9,
                                  int max_iter = 2000) {
  const Eigen::Index n = a.cols();
  if (n == 0 || a.rows() == 0) return 0.0;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = Complex(1.0, 1e-3 * static_cast<double>((i * 2654435761u) % 1000));
  v.normalize();
  double s = 0.0;
  CVec av(a.rows());
  for (int it = 0; it < max_iter; ++it) {
    av.noalias() = a * v;
    v.noalias() = a.adjoint() * av;
    const double nv = v.norm();
    if (nv == 0.0) return 0.0;
    v /= nv;
    const double s_new = std::sqrt(nv);
    if (it > 2 && std::abs(s_new - s) <= rel_tol * std::max(1e-300, s_new)) {
      return s_new;
    }
    s = s_new;
  }
  return s;
}

}  // namespace diracres
