// Thin wrappers over the LAPACK drivers used for dense eigenproblems.
#pragma once

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "soliton/errors.hpp"

extern "C" {
void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a, const int* lda, double* wr,
            double* wi, double* vl, const int* ldvl, double* vr, const int* ldvr, double* work,
            const int* lwork, int* info);
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda, double* w,
             double* work, const int* lwork, int* iwork, const int* liwork, int* info);
}

namespace soliton::lapack {

struct GeneralEigen {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;  // empty unless requested; columns normalized to unit 2-norm
};

/// Eigenvalues (and right eigenvectors) of a real square matrix via Hessenberg
/// reduction and shifted QR. `A` is overwritten.
inline GeneralEigen geev(Eigen::MatrixXd& A, bool want_vectors) {
  const int n = static_cast<int>(A.rows());
  GeneralEigen out;
  if (n == 0) return out;
  std::vector<double> wr(static_cast<std::size_t>(n)), wi(static_cast<std::size_t>(n));
  const int one = 1;
  const int ldvr = want_vectors ? n : 1;
  std::vector<double> vr(want_vectors ? static_cast<std::size_t>(n) * n : 1);
  const char jobvl = 'N', jobvr = want_vectors ? 'V' : 'N';
  int lwork = -1, info = 0;
  double query = 0.0;
  dgeev_(&jobvl, &jobvr, &n, A.data(), &n, wr.data(), wi.data(), nullptr, &one, vr.data(), &ldvr, &query,
         &lwork, &info);
  lwork = std::max(1, static_cast<int>(query));
  std::vector<double> work(static_cast<std::size_t>(lwork));
  dgeev_(&jobvl, &jobvr, &n, A.data(), &n, wr.data(), wi.data(), nullptr, &one, vr.data(), &ldvr,
         work.data(), &lwork, &info);
  if (info < 0) throw Error("dgeev: illegal argument " + std::to_string(-info));
  if (info > 0)
    throw SolverError("QR iteration did not converge; eigenvalues 1.." + std::to_string(info) +
                          " of the Schur form are unconverged",
                      static_cast<double>(info));

  out.values.resize(n);
  for (int j = 0; j < n; ++j) out.values(j) = {wr[static_cast<std::size_t>(j)], wi[static_cast<std::size_t>(j)]};
  if (!want_vectors) return out;

  // Complex pairs are stored as (re, im) in consecutive columns.
  out.vectors.resize(n, n);
  const Eigen::Map<const Eigen::MatrixXd> V(vr.data(), n, n);
  for (int j = 0; j < n; ++j) {
    if (wi[static_cast<std::size_t>(j)] == 0.0) {
      out.vectors.col(j) = V.col(j).cast<std::complex<double>>();
    } else {
      const Eigen::VectorXcd z = V.col(j).cast<std::complex<double>>() +
                                 std::complex<double>(0.0, 1.0) * V.col(j + 1).cast<std::complex<double>>();
      out.vectors.col(j) = z;
      out.vectors.col(j + 1) = z.conjugate();
      ++j;
    }
  }
  for (int j = 0; j < n; ++j) out.vectors.col(j).normalize();
  return out;
}

struct SymmetricEigen {
  Eigen::VectorXd values;  // ascending
  Eigen::MatrixXd vectors;
};

/// Symmetric eigendecomposition (divide and conquer). Only the lower triangle is read.
inline SymmetricEigen syevd(Eigen::MatrixXd A, bool want_vectors = true) {
  const int n = static_cast<int>(A.rows());
  SymmetricEigen out;
  out.values.resize(n);
  if (n == 0) return out;
  const char jobz = want_vectors ? 'V' : 'N', uplo = 'L';
  int lwork = -1, liwork = -1, info = 0;
  double wq = 0.0;
  int iq = 0;
  dsyevd_(&jobz, &uplo, &n, A.data(), &n, out.values.data(), &wq, &lwork, &iq, &liwork, &info);
  lwork = std::max(1, static_cast<int>(wq));
  liwork = std::max(1, iq);
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  dsyevd_(&jobz, &uplo, &n, A.data(), &n, out.values.data(), work.data(), &lwork, iwork.data(), &liwork,
          &info);
  if (info != 0) throw SolverError("dsyevd failed with info " + std::to_string(info), static_cast<double>(info));
  if (want_vectors) out.vectors = std::move(A);
  return out;
}

}  // namespace soliton::lapack
