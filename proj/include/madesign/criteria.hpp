#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "madesign/symmat.hpp"

namespace madesign {

using ScalarFn = std::function<double(double)>;

enum class CriterionKind { D, A, PMean, CVector, TraceG, Scalar1D };

/// Structural properties of psi(M) = -phi(M^{-1}) that gate solver
/// guarantees (monotonicity, strict monotonicity, interior preservation).
struct CriterionFlags {
  bool psi_isotonic = false;
  bool psi_concave = false;
  bool psi_strictly_isotonic = false;
  bool psi_strictly_concave = false;
  bool grad_positive_definite = false;
};

/// An optimality criterion phi together with its inverse-space counterpart
/// psi(M) = -phi(M^{-1}) and the structural flags of psi.
///
/// Built-in kinds:
///   D          phi(M) = ln det(M)
///   A          phi(M) = -tr(M^{-1})
///   PMean(p)   phi(M) = -tr(M^{-p}),          p > 0
///   CVector(c) phi(M) = -c^T M^{-1} c,        c != 0
///   TraceG(g)  phi(M) = -tr(g(M^{-1}))        (psi = tr o g)
///   Scalar1D   phi supplied directly, d = 1 only
class Criterion {
 public:
  static Criterion D();
  static Criterion A();
  static Criterion PMean(double p);
  static Criterion CVector(Eigen::VectorXd c);
  static Criterion TraceG(ScalarFn g, ScalarFn dg, CriterionFlags flags = {});
  static Criterion Scalar1D(ScalarFn phi, ScalarFn dphi, CriterionFlags flags = {});

  /// Parse the CLI grammar: "D", "A", "pmean:<p>", "c:<v1,v2,...>".
  static Criterion parse(std::string_view spec);
  /// Inverse of parse for the built-in kinds.
  std::string spec_string() const;

  CriterionKind kind() const { return kind_; }
  const CriterionFlags& flags() const { return flags_; }
  double p() const { return p_; }
  const Eigen::VectorXd& c() const { return c_; }
  const ScalarFn& g() const { return g_; }
  const ScalarFn& dg() const { return dg_; }

  /// The duality-gap stopping bound is offered only where phi itself is
  /// known concave: the D-, A- and p-mean criteria.
  bool gap_bound_available() const {
    return kind_ == CriterionKind::D || kind_ == CriterionKind::A ||
           kind_ == CriterionKind::PMean;
  }

 private:
  Criterion() = default;
  CriterionKind kind_ = CriterionKind::D;
  CriterionFlags flags_;
  double p_ = 0.0;
  Eigen::VectorXd c_;
  ScalarFn g_, dg_;  // TraceG: g and g'; Scalar1D: phi and phi'
};

/// Extended-value objective Phi(M): phi(M) when M is positive definite
/// (relative tolerance kPdTol), -infinity otherwise.
double eval_phi(const Criterion& crit, const SymMatrix& m);

/// Gradient of phi at a positive definite M, as a full symmetric matrix.
/// Throws NotPD otherwise.
SymMatrix grad_phi(const Criterion& crit, const SymMatrix& m);

/// psi(M) = -phi(M^{-1}) evaluated in closed form. Throws NotPD.
double eval_psi(const Criterion& crit, const SymMatrix& m);

/// Gradient of psi at a positive definite M.
SymMatrix grad_psi(const Criterion& crit, const SymMatrix& m);

/// Gradient of phi computed through the identity
/// grad phi(M) = M^{-1} grad psi(M^{-1}) M^{-1}, kept as a separate code
/// path so the identity stays testable.
SymMatrix grad_phi_via_psi(const Criterion& crit, const SymMatrix& m);

/// -psi(M^{-1}); equals eval_phi(crit, M) when the T transform is an involution.
double t_transform_roundtrip(const Criterion& crit, const SymMatrix& m);

/// The two sides of <grad phi(M), M> = <grad psi(M^{-1}), M^{-1}>.
std::pair<double, double> trace_contraction_check(const Criterion& crit,
                                                  const SymMatrix& m);

}  // namespace madesign
