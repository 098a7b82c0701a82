#include "madesign/symmat.hpp"

#include <cmath>
#include <string>

namespace madesign {

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionMismatch("SymMatrix requires a square matrix of dim >= 1, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  // (a_ij + a_ji)/2 is evaluated once per unordered pair, so the two
  // triangles match exactly.
  m_ = 0.5 * (m + m.transpose().eval());
}

SymMatrix SymMatrix::identity(Eigen::Index d) {
  return SymMatrix(Eigen::MatrixXd::Identity(d, d));
}

SymMatrix SymMatrix::zero(Eigen::Index d) {
  return SymMatrix(Eigen::MatrixXd::Zero(d, d));
}

SymMatrix SymMatrix::from_diagonal(const Eigen::VectorXd& diag) {
  return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& x) {
  return SymMatrix(x * x.transpose());
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("SymMatrix sum: dimension mismatch");
  return SymMatrix(m_ + other.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  if (other.dim() != dim()) throw DimensionMismatch("SymMatrix difference: dimension mismatch");
  return SymMatrix(m_ - other.m_);
}

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("inner: dimension mismatch");
  // tr(AB) = sum_ij A_ij B_ij for symmetric A, B.
  return (a.mat().array() * b.mat().array()).sum();
}

SymMatrix SpectralDecomposition::reconstruct() const {
  return SymMatrix(eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose());
}

SymMatrix SpectralDecomposition::apply(const std::function<double(double)>& g) const {
  Eigen::VectorXd mapped(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) mapped[i] = g(eigenvalues[i]);
  return SymMatrix(eigenvectors * mapped.asDiagonal() * eigenvectors.transpose());
}

SpectralDecomposition spectral_decompose(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw EigenSolverFailure("symmetric eigen-solver failed on a " +
                             std::to_string(m.dim()) + "x" + std::to_string(m.dim()) +
                             " matrix");
  }
  // Eigen returns eigenvalues in increasing order; flip to nonincreasing.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

bool is_pd(const SymMatrix& m, double tol) {
  const auto sd = spectral_decompose(m);
  const double lam_max = sd.eigenvalues[0];
  const double lam_min = sd.eigenvalues[sd.eigenvalues.size() - 1];
  return lam_min > tol * std::max(1.0, lam_max);
}

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw DimensionMismatch("loewner_leq: dimension mismatch");
  const auto sd = spectral_decompose(b - a);
  const double lam_max = sd.eigenvalues[0];
  const double lam_min = sd.eigenvalues[sd.eigenvalues.size() - 1];
  return lam_min >= -tol * std::max(1.0, lam_max);
}

SymMatrix pseudo_inverse(const SymMatrix& m, double rank_tol) {
  const auto sd = spectral_decompose(m);
  const double scale = sd.eigenvalues.cwiseAbs().maxCoeff();
  const double thresh = rank_tol * scale;
  Eigen::VectorXd inv(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double lam = sd.eigenvalues[i];
    if (lam < -thresh) {
      throw NotPSD("pseudo_inverse: eigenvalue " + std::to_string(lam) +
                   " below the PSD tolerance");
    }
    inv[i] = (lam > thresh) ? 1.0 / lam : 0.0;
  }
  return SymMatrix(sd.eigenvectors * inv.asDiagonal() * sd.eigenvectors.transpose());
}

SymMatrix matrix_fn(const SymMatrix& m, const std::function<double(double)>& g) {
  const auto sd = spectral_decompose(m);
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    if (!(sd.eigenvalues[i] > 0.0)) {
      throw DomainError("matrix_fn: nonpositive eigenvalue " +
                        std::to_string(sd.eigenvalues[i]));
    }
  }
  return sd.apply(g);
}

SymMatrix inverse_pd(const SymMatrix& m) {
  return matrix_fn(m, [](double t) { return 1.0 / t; });
}

SymMatrix sqrt_psd(const SymMatrix& m, double rank_tol) {
  const auto sd = spectral_decompose(m);
  const double scale = sd.eigenvalues.cwiseAbs().maxCoeff();
  const double thresh = rank_tol * scale;
  Eigen::VectorXd roots(sd.eigenvalues.size());
  for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
    const double lam = sd.eigenvalues[i];
    if (lam < -thresh) {
      throw NotPSD("sqrt_psd: eigenvalue " + std::to_string(lam) +
                   " below the PSD tolerance");
    }
    roots[i] = (lam > 0.0) ? std::sqrt(lam) : 0.0;
  }
  return SymMatrix(sd.eigenvectors * roots.asDiagonal() * sd.eigenvectors.transpose());
}

bool range_contains(const SymMatrix& m, const Eigen::MatrixXd& k, double rank_tol) {
  if (k.rows() != m.dim()) throw DimensionMismatch("range_contains: K row count != dim(M)");
  const SymMatrix pinv = pseudo_inverse(m);
  const Eigen::MatrixXd residual = k - m.mat() * (pinv.mat() * k);
  return residual.norm() <= rank_tol * k.norm();
}

}  // namespace madesign
