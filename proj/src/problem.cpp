#include "madesign/problem.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace madesign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_cvector_pair(const Criterion& crit, const GeneralizedSpec& spec) {
  if (crit.kind() != CriterionKind::CVector || spec.s() != 1) return false;
  const Eigen::VectorXd k = spec.K().col(0);
  const Eigen::VectorXd& c = crit.c();
  if (k.size() != c.size()) return false;
  // K and c must span the same line.
  return std::abs(std::abs(k.dot(c)) - k.norm() * c.norm()) <=
         1e-12 * k.norm() * c.norm();
}

}  // namespace

DesignInstance::DesignInstance(std::vector<SymMatrix> matrices,
                               std::vector<std::string> labels)
    : matrices_(std::move(matrices)), labels_(std::move(labels)) {
  if (matrices_.empty()) throw DomainError("DesignInstance: no matrices");
  const Eigen::Index d = matrices_.front().dim();
  SymMatrix total = SymMatrix::zero(d);
  for (size_t i = 0; i < matrices_.size(); ++i) {
    const SymMatrix& a = matrices_[i];
    if (a.dim() != d) {
      throw DimensionMismatch("DesignInstance: matrix " + std::to_string(i + 1) +
                              " has dimension " + std::to_string(a.dim()) +
                              ", expected " + std::to_string(d));
    }
    if (a.is_zero()) {
      throw DomainError("DesignInstance: matrix " + std::to_string(i + 1) + " is zero");
    }
    if (!loewner_leq(SymMatrix::zero(d), a)) {
      throw NotPSD("DesignInstance: matrix " + std::to_string(i + 1) +
                   " is not positive semidefinite");
    }
    total = total + a;
  }
  if (!is_pd(total)) {
    throw NotPD("DesignInstance: sum of the A_i is not positive definite");
  }
  if (!labels_.empty() && labels_.size() != matrices_.size()) {
    throw DomainError("DesignInstance: label count does not match matrix count");
  }
}

Weights::Weights(Eigen::VectorXd w) : w_(std::move(w)) {
  if (w_.size() < 1) throw DomainError("Weights: empty vector");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (w_[i] < 0.0 || !std::isfinite(w_[i])) {
      throw DomainError("Weights: coordinate " + std::to_string(i + 1) +
                        " is negative or not finite");
    }
    sum += w_[i];
  }
  if (!(sum > 0.0)) throw DomainError("Weights: all coordinates are zero");
  w_ /= sum;
  // One correction pass keeps the sum within a few ulps of one even for
  // large n.
  const double resum = w_.sum();
  if (resum != 1.0) w_ /= resum;
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (w_[i] > 0.0) support_.push_back(static_cast<int>(i));
  }
}

Weights Weights::uniform(int n) {
  return Weights(Eigen::VectorXd::Constant(n, 1.0 / n));
}

Weights Weights::vertex(int n, int i) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[i] = 1.0;
  return Weights(std::move(w));
}

GeneralizedSpec::GeneralizedSpec(Eigen::MatrixXd k) : k_(std::move(k)) {
  if (k_.rows() < 1 || k_.cols() < 1 || k_.cols() > k_.rows()) {
    throw DimensionMismatch("GeneralizedSpec: K must be d x s with 1 <= s <= d");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(k_);
  qr.setThreshold(1e-12);
  if (qr.rank() != k_.cols()) {
    throw DomainError("GeneralizedSpec: K does not have full column rank");
  }
}

GeneralizedSpec GeneralizedSpec::identity(Eigen::Index d) {
  return GeneralizedSpec(Eigen::MatrixXd::Identity(d, d));
}

bool GeneralizedSpec::is_identity() const {
  return k_.rows() == k_.cols() && k_.isIdentity(0.0);
}

SymMatrix moment_matrix(const DesignInstance& inst, const Weights& w) {
  return moment_matrix(inst, w.vec());
}

SymMatrix moment_matrix(const DesignInstance& inst, const Eigen::VectorXd& v) {
  if (v.size() != inst.n()) {
    throw DimensionMismatch("moment_matrix: weight count " + std::to_string(v.size()) +
                            " != design size " + std::to_string(inst.n()));
  }
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(inst.d(), inst.d());
  for (int i = 0; i < inst.n(); ++i) {
    if (v[i] != 0.0) acc += v[i] * inst.matrix(i).mat();
  }
  return SymMatrix(acc);
}

double objective(const DesignInstance& inst, const Criterion& crit, const Weights& w) {
  return eval_phi(crit, moment_matrix(inst, w));
}

Eigen::VectorXd gradient(const DesignInstance& inst, const Criterion& crit,
                         const Weights& w) {
  const SymMatrix m = moment_matrix(inst, w);
  SymMatrix g = SymMatrix::zero(inst.d());
  try {
    g = grad_phi(crit, m);
  } catch (const NotPD&) {
    throw NonDifferentiablePoint(
        "gradient: moment matrix is not positive definite; f is not "
        "differentiable here");
  }
  Eigen::VectorXd out(inst.n());
  for (int i = 0; i < inst.n(); ++i) out[i] = inner(g, inst.matrix(i));
  return out;
}

namespace {

OptimalityResidual residual_from_gradient(const Weights& w,
                                          const Eigen::VectorXd& grad, double tol) {
  OptimalityResidual res;
  res.max_grad = grad.maxCoeff();
  res.avg_grad = w.vec().dot(grad);
  double support_max = -std::numeric_limits<double>::infinity();
  for (int i : w.support()) support_max = std::max(support_max, grad[i]);
  const double slack = tol * std::max(1.0, std::abs(support_max));
  bool ok = true;
  for (int i = 0; i < w.n(); ++i) {
    if (w[i] > 0.0) {
      if (grad[i] < support_max - slack) ok = false;
    } else {
      if (grad[i] > support_max + slack) ok = false;
    }
  }
  res.certificate = ok;
  return res;
}

}  // namespace

OptimalityResidual optimality_residual(const DesignInstance& inst,
                                       const Criterion& crit, const Weights& w,
                                       double tol, const GeneralizedSpec* spec) {
  const Eigen::VectorXd grad =
      spec ? generalized_gradient(inst, crit, w, *spec) : gradient(inst, crit, w);
  return residual_from_gradient(w, grad, tol);
}

double gap_from_gradient(const Weights& w, const Eigen::VectorXd& grad) {
  // Summing w_i (max - grad_i) avoids the cancellation of max - <w,grad>,
  // which rounds to zero while a near-dead coordinate still lags the max.
  const double top = grad.maxCoeff();
  double gap = 0.0;
  for (int i = 0; i < w.n(); ++i) gap += w[i] * (top - grad[i]);
  return std::max(0.0, gap);
}

std::optional<double> duality_gap_bound(const DesignInstance& inst,
                                        const Criterion& crit, const Weights& w) {
  if (!crit.gap_bound_available()) return std::nullopt;
  const Eigen::VectorXd grad = gradient(inst, crit, w);
  return gap_from_gradient(w, grad);
}

bool feasibility_cone_member(const DesignInstance& inst, const Weights& w,
                             const GeneralizedSpec& spec, double rank_tol) {
  if (spec.d() != inst.d()) {
    throw DimensionMismatch("feasibility_cone_member: K has wrong row count");
  }
  const SymMatrix m = moment_matrix(inst, w);
  if (!loewner_leq(SymMatrix::zero(inst.d()), m)) return false;
  return range_contains(m, spec.K(), rank_tol);
}

SymMatrix information_matrix(const DesignInstance& inst, const Weights& w,
                             const GeneralizedSpec& spec) {
  if (!feasibility_cone_member(inst, w, spec)) {
    throw InfeasibleMoment("information_matrix: M(w) is outside the feasibility cone");
  }
  const SymMatrix m = moment_matrix(inst, w);
  if (spec.is_identity()) return m;
  const SymMatrix pinv = pseudo_inverse(m);
  const SymMatrix core = SymMatrix(spec.K().transpose() * pinv.mat() * spec.K());
  return inverse_pd(core);
}

double generalized_objective(const DesignInstance& inst, const Criterion& crit,
                             const Weights& w, const GeneralizedSpec& spec) {
  if (spec.is_identity()) return objective(inst, crit, w);
  if (!is_cvector_pair(crit, spec)) {
    throw Error(
        "generalized mode supports K = I with any criterion, or K = c with "
        "the matching c-criterion");
  }
  if (!feasibility_cone_member(inst, w, spec)) return kNegInf;
  const SymMatrix m = moment_matrix(inst, w);
  const SymMatrix pinv = pseudo_inverse(m);
  return -crit.c().dot(pinv.mat() * crit.c());
}

Eigen::VectorXd generalized_gradient(const DesignInstance& inst,
                                     const Criterion& crit, const Weights& w,
                                     const GeneralizedSpec& spec) {
  if (spec.is_identity()) return gradient(inst, crit, w);
  if (!is_cvector_pair(crit, spec)) {
    throw Error(
        "generalized mode supports K = I with any criterion, or K = c with "
        "the matching c-criterion");
  }
  if (!feasibility_cone_member(inst, w, spec)) {
    throw InfeasibleMoment("generalized_gradient: M(w) is outside the feasibility cone");
  }
  const SymMatrix m = moment_matrix(inst, w);
  const SymMatrix pinv = pseudo_inverse(m);
  const SymMatrix g = SymMatrix::outer(pinv.mat() * crit.c());
  Eigen::VectorXd out(inst.n());
  for (int i = 0; i < inst.n(); ++i) out[i] = inner(g, inst.matrix(i));
  return out;
}

}  // namespace madesign
