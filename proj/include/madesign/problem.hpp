#pragma once

#include <optional>
#include <string>
#include <vector>

#include "madesign/criteria.hpp"
#include "madesign/symmat.hpp"

namespace madesign {

/// A design problem: information matrices A_1..A_n, all d x d.
/// Construction certifies A_i >= 0, A_i != 0 and sum A_i > 0.
class DesignInstance {
 public:
  explicit DesignInstance(std::vector<SymMatrix> matrices,
                          std::vector<std::string> labels = {});

  int n() const { return static_cast<int>(matrices_.size()); }
  Eigen::Index d() const { return matrices_.front().dim(); }
  const SymMatrix& matrix(int i) const { return matrices_.at(i); }
  const std::vector<SymMatrix>& matrices() const { return matrices_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<SymMatrix> matrices_;
  std::vector<std::string> labels_;
};

/// A point of the simplex with an explicit support set. Construction
/// renormalizes so the coordinates sum to one.
class Weights {
 public:
  explicit Weights(Eigen::VectorXd w);
  static Weights uniform(int n);
  static Weights vertex(int n, int i);

  int n() const { return static_cast<int>(w_.size()); }
  double operator[](int i) const { return w_[i]; }
  const Eigen::VectorXd& vec() const { return w_; }
  const std::vector<int>& support() const { return support_; }
  bool interior() const { return static_cast<int>(support_.size()) == n(); }

 private:
  Eigen::VectorXd w_;
  std::vector<int> support_;
};

/// The K of the generalized formulation: a d x s matrix of full column
/// rank. The solver exercises K = I (s = d) and K = c (s = 1).
class GeneralizedSpec {
 public:
  explicit GeneralizedSpec(Eigen::MatrixXd k);
  static GeneralizedSpec identity(Eigen::Index d);

  const Eigen::MatrixXd& K() const { return k_; }
  Eigen::Index d() const { return k_.rows(); }
  Eigen::Index s() const { return k_.cols(); }
  bool is_identity() const;

 private:
  Eigen::MatrixXd k_;
};

/// M(w) = sum_i w_i A_i.
SymMatrix moment_matrix(const DesignInstance& inst, const Weights& w);
/// Same contraction for a raw coefficient vector (no simplex normalization);
/// used by finite-difference oracles that step off the simplex.
SymMatrix moment_matrix(const DesignInstance& inst, const Eigen::VectorXd& v);

/// f(w) = Phi(M(w)); -infinity outside the positive definite region.
double objective(const DesignInstance& inst, const Criterion& crit, const Weights& w);

/// Full gradient vector grad_i f(w) = <grad phi(M(w)), A_i> on every
/// coordinate, support or not. Throws NonDifferentiablePoint if M(w) is
/// not positive definite.
Eigen::VectorXd gradient(const DesignInstance& inst, const Criterion& crit,
                         const Weights& w);

struct OptimalityResidual {
  double max_grad = 0.0;  // max_i grad_i f(w) over all coordinates
  double avg_grad = 0.0;  // <w, grad f(w)>
  bool certificate = false;
};

/// First-order optimality check: support gradients equal their maximum
/// within tol (relative to max(1,|max|)) and off-support gradients do not
/// exceed it. When spec is given, uses the generalized (sub)gradient.
OptimalityResidual optimality_residual(const DesignInstance& inst,
                                       const Criterion& crit, const Weights& w,
                                       double tol,
                                       const GeneralizedSpec* spec = nullptr);

/// max_i grad_i f(w) - <w, grad f(w)>, an upper bound on f* - f(w) valid for
/// concave phi. Offered only for the D-, A- and p-mean criteria; nullopt
/// otherwise.
std::optional<double> duality_gap_bound(const DesignInstance& inst,
                                        const Criterion& crit, const Weights& w);

/// The same bound from an already-computed gradient, evaluated as
/// sum_i w_i (max grad - grad_i) for numerical headroom near zero.
double gap_from_gradient(const Weights& w, const Eigen::VectorXd& grad);

/// M(w) in the feasibility cone F(K): M(w) PSD with R(K) subseteq R(M(w)).
bool feasibility_cone_member(const DesignInstance& inst, const Weights& w,
                             const GeneralizedSpec& spec,
                             double rank_tol = 1e-9);

/// C_K(M(w)) = (K^T M(w)^+ K)^{-1}, the s x s information matrix of the
/// subsystem. Throws InfeasibleMoment outside the feasibility cone.
SymMatrix information_matrix(const DesignInstance& inst, const Weights& w,
                             const GeneralizedSpec& spec);

/// Objective of the generalized problem: Gamma(M(w)). Supported
/// combinations: K = I with any criterion (reduces to the strict
/// objective), and K = c with the matching CVector criterion, where
/// Gamma(M) = -c^T M^+ c on the cone.
double generalized_objective(const DesignInstance& inst, const Criterion& crit,
                             const Weights& w, const GeneralizedSpec& spec);

/// Gradient (for K = I) or the pseudo-inverse subgradient selection
/// M^+ c c^T M^+ (for K = c) contracted against every A_i.
Eigen::VectorXd generalized_gradient(const DesignInstance& inst,
                                     const Criterion& crit, const Weights& w,
                                     const GeneralizedSpec& spec);

}  // namespace madesign
