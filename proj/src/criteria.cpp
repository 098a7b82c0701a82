#include "madesign/criteria.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace madesign {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool spectrum_is_pd(const SpectralDecomposition& sd, double tol = kPdTol) {
  const double lam_max = sd.eigenvalues[0];
  const double lam_min = sd.eigenvalues[sd.eigenvalues.size() - 1];
  return lam_min > tol * std::max(1.0, lam_max);
}

SpectralDecomposition decompose_pd(const SymMatrix& m, const char* who) {
  auto sd = spectral_decompose(m);
  if (!spectrum_is_pd(sd)) {
    throw NotPD(std::string(who) + ": matrix is not positive definite");
  }
  return sd;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Criterion Criterion::D() {
  Criterion c;
  c.kind_ = CriterionKind::D;
  c.flags_ = {true, true, true, true, true};
  return c;
}

Criterion Criterion::A() {
  Criterion c;
  c.kind_ = CriterionKind::A;
  c.flags_ = {true, true, false, false, true};
  return c;
}

Criterion Criterion::PMean(double p) {
  if (!(p > 0.0)) throw DomainError("PMean criterion requires p > 0");
  Criterion c;
  c.kind_ = CriterionKind::PMean;
  c.p_ = p;
  c.flags_.psi_isotonic = true;
  c.flags_.psi_concave = (p <= 1.0);
  c.flags_.psi_strictly_isotonic = (p < 1.0);
  c.flags_.psi_strictly_concave = (p < 1.0);
  c.flags_.grad_positive_definite = true;
  return c;
}

Criterion Criterion::CVector(Eigen::VectorXd cvec) {
  if (cvec.size() < 1 || cvec.isZero(0.0)) {
    throw DomainError("CVector criterion requires a nonzero vector");
  }
  Criterion c;
  c.kind_ = CriterionKind::CVector;
  c.c_ = std::move(cvec);
  // psi(M) = c^T M c is linear: isotonic and (non-strictly) concave, and its
  // gradient cc^T is only PSD, not PD.
  c.flags_ = {true, true, false, false, false};
  return c;
}

Criterion Criterion::TraceG(ScalarFn g, ScalarFn dg, CriterionFlags flags) {
  Criterion c;
  c.kind_ = CriterionKind::TraceG;
  c.g_ = std::move(g);
  c.dg_ = std::move(dg);
  c.flags_ = flags;
  return c;
}

Criterion Criterion::Scalar1D(ScalarFn phi, ScalarFn dphi, CriterionFlags flags) {
  Criterion c;
  c.kind_ = CriterionKind::Scalar1D;
  c.g_ = std::move(phi);
  c.dg_ = std::move(dphi);
  c.flags_ = flags;
  return c;
}

Criterion Criterion::parse(std::string_view spec) {
  if (spec == "D") return D();
  if (spec == "A") return A();
  if (spec.rfind("pmean:", 0) == 0) {
    const std::string arg(spec.substr(6));
    try {
      size_t pos = 0;
      const double p = std::stod(arg, &pos);
      if (pos != arg.size()) throw std::invalid_argument("trailing characters");
      return PMean(p);
    } catch (const std::exception& e) {
      throw ParseError("bad p-mean exponent '" + arg + "': " + e.what());
    }
  }
  if (spec.rfind("c:", 0) == 0) {
    std::vector<double> values;
    std::stringstream ss{std::string(spec.substr(2))};
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        size_t pos = 0;
        values.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception& e) {
        throw ParseError("bad c-vector entry '" + item + "': " + e.what());
      }
    }
    if (values.empty()) throw ParseError("empty c-vector");
    Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(values.data(), values.size());
    if (c.isZero(0.0)) throw ParseError("c-vector must be nonzero");
    return CVector(std::move(c));
  }
  throw ParseError("unknown criterion spec '" + std::string(spec) +
                   "' (expected D, A, pmean:<p>, or c:<v1,v2,...>)");
}

std::string Criterion::spec_string() const {
  switch (kind_) {
    case CriterionKind::D:
      return "D";
    case CriterionKind::A:
      return "A";
    case CriterionKind::PMean:
      return "pmean:" + format_double(p_);
    case CriterionKind::CVector: {
      std::string out = "c:";
      for (Eigen::Index i = 0; i < c_.size(); ++i) {
        if (i > 0) out += ",";
        out += format_double(c_[i]);
      }
      return out;
    }
    case CriterionKind::TraceG:
      return "custom:traceg";
    case CriterionKind::Scalar1D:
      return "custom:scalar1d";
  }
  return "?";
}

double eval_phi(const Criterion& crit, const SymMatrix& m) {
  if (crit.kind() == CriterionKind::Scalar1D && m.dim() != 1) {
    throw DimensionMismatch("Scalar1D criterion requires a 1x1 matrix");
  }
  if (crit.kind() == CriterionKind::CVector && crit.c().size() != m.dim()) {
    throw DimensionMismatch("CVector criterion: c has wrong dimension");
  }
  const auto sd = spectral_decompose(m);
  if (!spectrum_is_pd(sd)) return kNegInf;

  const auto& lam = sd.eigenvalues;
  switch (crit.kind()) {
    case CriterionKind::D: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += std::log(lam[i]);
      return acc;
    }
    case CriterionKind::A: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += 1.0 / lam[i];
      return -acc;
    }
    case CriterionKind::PMean: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += std::pow(lam[i], -crit.p());
      return -acc;
    }
    case CriterionKind::CVector: {
      const Eigen::VectorXd proj = sd.eigenvectors.transpose() * crit.c();
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += proj[i] * proj[i] / lam[i];
      return -acc;
    }
    case CriterionKind::TraceG: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += crit.g()(1.0 / lam[i]);
      return -acc;
    }
    case CriterionKind::Scalar1D:
      return crit.g()(m(0, 0));
  }
  return kNegInf;
}

SymMatrix grad_phi(const Criterion& crit, const SymMatrix& m) {
  if (crit.kind() == CriterionKind::Scalar1D && m.dim() != 1) {
    throw DimensionMismatch("Scalar1D criterion requires a 1x1 matrix");
  }
  if (crit.kind() == CriterionKind::CVector && crit.c().size() != m.dim()) {
    throw DimensionMismatch("CVector criterion: c has wrong dimension");
  }
  const auto sd = decompose_pd(m, "grad_phi");
  switch (crit.kind()) {
    case CriterionKind::D:
      return sd.apply([](double t) { return 1.0 / t; });
    case CriterionKind::A:
      return sd.apply([](double t) { return 1.0 / (t * t); });
    case CriterionKind::PMean: {
      const double p = crit.p();
      return sd.apply([p](double t) { return p * std::pow(t, -(p + 1.0)); });
    }
    case CriterionKind::CVector: {
      const SymMatrix minv = sd.apply([](double t) { return 1.0 / t; });
      return SymMatrix::outer(minv.mat() * crit.c());
    }
    case CriterionKind::TraceG: {
      const auto& dg = crit.dg();
      return sd.apply([&dg](double t) { return dg(1.0 / t) / (t * t); });
    }
    case CriterionKind::Scalar1D: {
      Eigen::MatrixXd g(1, 1);
      g(0, 0) = crit.dg()(m(0, 0));
      return SymMatrix(g);
    }
  }
  throw Error("unreachable");
}

double eval_psi(const Criterion& crit, const SymMatrix& m) {
  if (crit.kind() == CriterionKind::Scalar1D && m.dim() != 1) {
    throw DimensionMismatch("Scalar1D criterion requires a 1x1 matrix");
  }
  if (crit.kind() == CriterionKind::CVector && crit.c().size() != m.dim()) {
    throw DimensionMismatch("CVector criterion: c has wrong dimension");
  }
  const auto sd = decompose_pd(m, "eval_psi");
  const auto& lam = sd.eigenvalues;
  switch (crit.kind()) {
    case CriterionKind::D: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += std::log(lam[i]);
      return acc;
    }
    case CriterionKind::A:
      return lam.sum();
    case CriterionKind::PMean: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += std::pow(lam[i], crit.p());
      return acc;
    }
    case CriterionKind::CVector:
      return crit.c().dot(m.mat() * crit.c());
    case CriterionKind::TraceG: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += crit.g()(lam[i]);
      return acc;
    }
    case CriterionKind::Scalar1D:
      return -crit.g()(1.0 / m(0, 0));
  }
  throw Error("unreachable");
}

SymMatrix grad_psi(const Criterion& crit, const SymMatrix& m) {
  if (crit.kind() == CriterionKind::Scalar1D && m.dim() != 1) {
    throw DimensionMismatch("Scalar1D criterion requires a 1x1 matrix");
  }
  if (crit.kind() == CriterionKind::CVector && crit.c().size() != m.dim()) {
    throw DimensionMismatch("CVector criterion: c has wrong dimension");
  }
  const auto sd = decompose_pd(m, "grad_psi");
  switch (crit.kind()) {
    case CriterionKind::D:
      return sd.apply([](double t) { return 1.0 / t; });
    case CriterionKind::A:
      return SymMatrix::identity(m.dim());
    case CriterionKind::PMean: {
      const double p = crit.p();
      return sd.apply([p](double t) { return p * std::pow(t, p - 1.0); });
    }
    case CriterionKind::CVector:
      return SymMatrix::outer(crit.c());
    case CriterionKind::TraceG:
      return sd.apply(crit.dg());
    case CriterionKind::Scalar1D: {
      const double t = m(0, 0);
      Eigen::MatrixXd g(1, 1);
      g(0, 0) = crit.dg()(1.0 / t) / (t * t);
      return SymMatrix(g);
    }
  }
  throw Error("unreachable");
}

SymMatrix grad_phi_via_psi(const Criterion& crit, const SymMatrix& m) {
  const SymMatrix minv = inverse_pd(m);
  const SymMatrix inner_grad = grad_psi(crit, minv);
  return SymMatrix(minv.mat() * inner_grad.mat() * minv.mat());
}

double t_transform_roundtrip(const Criterion& crit, const SymMatrix& m) {
  return -eval_psi(crit, inverse_pd(m));
}

std::pair<double, double> trace_contraction_check(const Criterion& crit,
                                                  const SymMatrix& m) {
  const SymMatrix minv = inverse_pd(m);
  return {inner(grad_phi(crit, m), m), inner(grad_psi(crit, minv), minv)};
}

}  // namespace madesign
