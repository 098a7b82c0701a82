#pragma once

#include <Eigen/Dense>
#include <functional>

#include "madesign/errors.hpp"

namespace madesign {

/// Default relative tolerance for positive-definiteness tests:
/// lambda_min > tol * max(1, lambda_max).
inline constexpr double kPdTol = 1e-10;

/// Default relative eigenvalue tolerance for Loewner-order tests.
inline constexpr double kLoewnerTol = 1e-10;

/// Default relative rank threshold for pseudo-inverse and range tests.
inline constexpr double kRankTol = 1e-12;

/// Dense real symmetric matrix. Construction symmetrizes the input so that
/// entry (i,j) equals entry (j,i) bit-for-bit; 1x1 matrices are supported.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(Eigen::Index d);
  static SymMatrix zero(Eigen::Index d);
  static SymMatrix from_diagonal(const Eigen::VectorXd& diag);
  /// Rank-one matrix x x^T.
  static SymMatrix outer(const Eigen::VectorXd& x);

  Eigen::Index dim() const { return m_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& mat() const { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  bool is_zero() const { return m_.isZero(0.0); }

  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix operator*(double s) const;

 private:
  Eigen::MatrixXd m_;
};

inline SymMatrix operator*(double s, const SymMatrix& m) { return m * s; }

/// Trace inner product <A,B> = tr(AB) of two symmetric matrices.
double inner(const SymMatrix& a, const SymMatrix& b);

/// Eigenvalues in nonincreasing order with matching orthonormal columns.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  SymMatrix reconstruct() const;
  /// Sum of g(lambda_i) u_i u_i^T over the spectrum.
  SymMatrix apply(const std::function<double(double)>& g) const;
};

/// Deterministic symmetric eigendecomposition (same input, same output).
/// Throws EigenSolverFailure if the iteration does not converge.
SpectralDecomposition spectral_decompose(const SymMatrix& m);

/// lambda_min(M) > tol * max(1, lambda_max(M)).
bool is_pd(const SymMatrix& m, double tol = kPdTol);

/// A <= B in the Loewner order: lambda_min(B-A) >= -tol * max(1, lambda_max(B-A)).
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol = kLoewnerTol);

/// Moore-Penrose pseudo-inverse of a PSD matrix. Eigenvalues above
/// rank_tol * ||lambda||_max are inverted, the rest zeroed; an eigenvalue
/// below -rank_tol * ||lambda||_max raises NotPSD.
SymMatrix pseudo_inverse(const SymMatrix& m, double rank_tol = kRankTol);

/// Lift a scalar function on (0, inf) to a positive definite matrix:
/// g(M) = sum g(lambda_i) u_i u_i^T. A nonpositive eigenvalue raises
/// DomainError naming the offending value.
SymMatrix matrix_fn(const SymMatrix& m, const std::function<double(double)>& g);

/// Inverse of a positive definite matrix through its spectrum.
SymMatrix inverse_pd(const SymMatrix& m);

/// Square root of a PSD matrix; eigenvalues within rank_tol of zero clamp to zero.
SymMatrix sqrt_psd(const SymMatrix& m, double rank_tol = kRankTol);

/// Range inclusion R(K) subseteq R(M) for PSD M, tested as
/// ||(I - M M^+) K||_F <= rank_tol * ||K||_F.
bool range_contains(const SymMatrix& m, const Eigen::MatrixXd& k,
                    double rank_tol = 1e-9);

}  // namespace madesign
