#include "madesign/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace madesign {

SymMatrix finite_difference_grad_phi(const Criterion& crit, const SymMatrix& m) {
  const Eigen::Index d = m.dim();
  const double h = 1e-5 * std::max(1.0, m.frobenius_norm());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(d, d);
      const double scale = (i == j) ? 0.5 : 1.0;  // (e_i e_j^T + e_j e_i^T)/(1+delta)
      dir(i, j) += scale;
      dir(j, i) += scale;
      const double fp = eval_phi(crit, SymMatrix(m.mat() + h * dir));
      const double fm = eval_phi(crit, SymMatrix(m.mat() - h * dir));
      const double deriv = (fp - fm) / (2.0 * h);
      if (i == j) {
        g(i, i) = deriv;
      } else {
        g(i, j) = deriv / 2.0;
        g(j, i) = deriv / 2.0;
      }
    }
  }
  return SymMatrix(g);
}

Eigen::VectorXd finite_difference_gradient_f(const DesignInstance& inst,
                                             const Criterion& crit,
                                             const Eigen::VectorXd& v) {
  const double h = 1e-5;
  Eigen::VectorXd g(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Eigen::VectorXd vp = v, vm = v;
    vp[i] += h;
    vm[i] -= h;
    const double fp = eval_phi(crit, moment_matrix(inst, vp));
    const double fm = eval_phi(crit, moment_matrix(inst, vm));
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

long double objective_extended(const DesignInstance& inst, const Criterion& crit,
                               const Eigen::VectorXd& w) {
  using MatLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatLD m = MatLD::Zero(inst.d(), inst.d());
  for (int i = 0; i < inst.n(); ++i) {
    m += static_cast<long double>(w[i]) * inst.matrix(i).mat().cast<long double>();
  }
  Eigen::SelfAdjointEigenSolver<MatLD> es(m);
  const auto& lam = es.eigenvalues();
  long double acc = 0;
  switch (crit.kind()) {
    case CriterionKind::D:
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += logl(lam[i]);
      return acc;
    case CriterionKind::A:
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += 1.0L / lam[i];
      return -acc;
    case CriterionKind::PMean:
      for (Eigen::Index i = 0; i < lam.size(); ++i) {
        acc += powl(lam[i], static_cast<long double>(-crit.p()));
      }
      return -acc;
    case CriterionKind::CVector: {
      const Eigen::Matrix<long double, Eigen::Dynamic, 1> proj =
          es.eigenvectors().transpose() * crit.c().cast<long double>();
      for (Eigen::Index i = 0; i < lam.size(); ++i) acc += proj[i] * proj[i] / lam[i];
      return -acc;
    }
    default:
      throw DomainError("objective_extended: unsupported criterion kind");
  }
}

McsResult mcs_check(const std::vector<Eigen::MatrixXd>& a_list,
                    const std::vector<Eigen::MatrixXd>& b_list, double tol) {
  if (a_list.empty() || a_list.size() != b_list.size()) {
    throw DimensionMismatch("mcs_check: need equally many A_i and B_i");
  }
  const Eigen::Index q = a_list.front().rows();
  const Eigen::Index p = a_list.front().cols();
  const Eigen::Index d = b_list.front().rows();
  Eigen::MatrixXd sum_aa = Eigen::MatrixXd::Zero(q, q);
  Eigen::MatrixXd sum_ba = Eigen::MatrixXd::Zero(d, q);
  Eigen::MatrixXd sum_bb = Eigen::MatrixXd::Zero(d, d);
  for (size_t i = 0; i < a_list.size(); ++i) {
    if (a_list[i].rows() != q || a_list[i].cols() != p || b_list[i].rows() != d ||
        b_list[i].cols() != p) {
      throw DimensionMismatch("mcs_check: inconsistent shapes at index " +
                              std::to_string(i + 1));
    }
    sum_aa += a_list[i] * a_list[i].transpose();
    sum_ba += b_list[i] * a_list[i].transpose();
    sum_bb += b_list[i] * b_list[i].transpose();
  }
  const SymMatrix saa{sum_aa};
  if (!is_pd(saa)) {
    throw NotPD("mcs_check: sum A_i A_i^T is not positive definite");
  }
  const Eigen::MatrixXd c = sum_ba * inverse_pd(saa).mat();

  McsResult res;
  res.holds = loewner_leq(SymMatrix(c * sum_ba.transpose()), SymMatrix(sum_bb), tol);
  res.equality = true;
  for (size_t i = 0; i < a_list.size(); ++i) {
    if ((b_list[i] - c * a_list[i]).norm() > tol) {
      res.equality = false;
      break;
    }
  }
  return res;
}

McsResult corollary_cs_check(const std::vector<SymMatrix>& v_list,
                             const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& beta, double tol) {
  const auto n = static_cast<Eigen::Index>(v_list.size());
  if (n == 0 || alpha.size() != n || beta.size() != n) {
    throw DimensionMismatch("corollary_cs_check: size mismatch");
  }
  const Eigen::Index d = v_list.front().dim();
  Eigen::MatrixXd sum_alpha = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_beta = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sum_mid = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (alpha[i] < 0.0 || beta[i] < 0.0) {
      throw DomainError("corollary_cs_check: alpha and beta must be nonnegative");
    }
    sum_alpha += alpha[i] * v_list[i].mat();
    sum_beta += beta[i] * v_list[i].mat();
    sum_mid += std::sqrt(alpha[i] * beta[i]) * v_list[i].mat();
  }
  const SymMatrix sa{sum_alpha};
  if (!is_pd(sa)) {
    throw NotPD("corollary_cs_check: sum alpha_i V_i is not positive definite");
  }
  const Eigen::MatrixXd sa_inv = inverse_pd(sa).mat();

  McsResult res;
  res.holds = loewner_leq(SymMatrix(sum_mid * sa_inv * sum_mid),
                          SymMatrix(sum_beta), tol);
  res.equality = true;
  const Eigen::MatrixXd mid_sa_inv = sum_mid * sa_inv;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd root = sqrt_psd(v_list[i]).mat();
    const Eigen::MatrixXd lhs = std::sqrt(beta[i]) * root;
    const Eigen::MatrixXd rhs = std::sqrt(alpha[i]) * mid_sa_inv * root;
    if ((lhs - rhs).norm() > tol) {
      res.equality = false;
      break;
    }
  }
  return res;
}

namespace {

void enumerate_compositions(int n, int remaining, std::vector<int>& parts,
                            const std::function<void(const std::vector<int>&)>& visit) {
  if (static_cast<int>(parts.size()) == n - 1) {
    parts.push_back(remaining);
    visit(parts);
    parts.pop_back();
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    parts.push_back(k);
    enumerate_compositions(n, remaining - k, parts, visit);
    parts.pop_back();
  }
}

}  // namespace

std::pair<Weights, double> brute_force_optimum(const DesignInstance& inst,
                                               const Criterion& crit,
                                               double grid_step,
                                               const GeneralizedSpec* spec) {
  if (inst.n() > 4) {
    throw DomainError("brute_force_optimum: refused for n > 4");
  }
  const double m_real = 1.0 / grid_step;
  const int m = static_cast<int>(std::lround(m_real));
  if (m < 1 || std::abs(m * grid_step - 1.0) > 1e-9) {
    throw DomainError("brute_force_optimum: grid_step must divide 1");
  }

  double best_f = -std::numeric_limits<double>::infinity();
  std::optional<Weights> best_w;
  std::vector<int> parts;
  enumerate_compositions(inst.n(), m, parts, [&](const std::vector<int>& ks) {
    Eigen::VectorXd w(inst.n());
    for (int i = 0; i < inst.n(); ++i) w[i] = static_cast<double>(ks[i]) / m;
    if (w.sum() <= 0.0) return;
    const Weights candidate{w};
    const double f = spec ? generalized_objective(inst, crit, candidate, *spec)
                          : objective(inst, crit, candidate);
    // Strict improvement keeps the first (lexicographically smallest)
    // maximizer under the ascending enumeration order.
    if (std::isfinite(f) && f > best_f) {
      best_f = f;
      best_w = candidate;
    }
  });
  if (!best_w) {
    throw DomainError("brute_force_optimum: no lattice point with finite objective");
  }
  return {*best_w, best_f};
}

std::array<double, 2> example1_map(const std::array<double, 2>& w, double lambda) {
  if (!(w[0] > 0.0) || !(w[1] > 0.0) || !(w[0] < 1.0) || !(w[1] < 1.0)) {
    throw DomainError("example1_map: w must be an interior point of the 2-simplex");
  }
  const double t = 1.0 - 2.0 * lambda;
  const double a = std::pow(w[0], t);
  const double b = std::pow(w[1], t);
  return {a / (a + b), b / (a + b)};
}

RateReport linear_rate_check(const std::vector<IterationRecord>& trace,
                             double f_star, double lambda) {
  if (lambda >= 1.0) {
    throw DomainError("linear_rate_check: no contraction claim at lambda = 1");
  }
  if (!(lambda > 0.0)) {
    throw DomainError("linear_rate_check: lambda must be in (0,1)");
  }
  RateReport report;
  report.bound = std::abs(1.0 - 2.0 * lambda);
  for (size_t k = 0; k + 1 < trace.size(); ++k) {
    if (!std::isfinite(trace[k].f) || !std::isfinite(trace[k + 1].f)) continue;
    const double gap = f_star - trace[k].f;
    if (gap <= 1e-13) continue;  // division noise dominates below this
    report.ratios.push_back((f_star - trace[k + 1].f) / gap);
  }
  report.max_ratio = 0.0;
  for (double r : report.ratios) report.max_ratio = std::max(report.max_ratio, r);
  report.satisfied = report.max_ratio <= report.bound + 1e-9;
  return report;
}

DesignInstance example1_instance() {
  Eigen::VectorXd e1(2), e2(2);
  e1 << 1, 0;
  e2 << 0, 1;
  return DesignInstance({SymMatrix::outer(e1), SymMatrix::outer(e2)}, {"x1", "x2"});
}

Criterion example1_criterion() { return Criterion::A(); }

DesignInstance example2_instance() {
  std::vector<SymMatrix> mats;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
    e[i] = 1.0;
    mats.push_back(SymMatrix::outer(e));
  }
  return DesignInstance(std::move(mats), {"x1", "x2", "x3"});
}

Criterion example2_criterion() {
  Eigen::VectorXd c(3);
  c << 1, 1, 0;
  return Criterion::CVector(c);
}

GeneralizedSpec eq3d2_spec() {
  Eigen::MatrixXd k(3, 1);
  k << 1, 1, 0;
  return GeneralizedSpec(k);
}

Eigen::MatrixXd random_gaussian(Eigen::Index rows, Eigen::Index cols,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  }
  return g;
}

SymMatrix random_psd(Eigen::Index d, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = random_gaussian(d, d, rng);
  return SymMatrix(g * g.transpose());
}

SymMatrix random_pd(Eigen::Index d, std::mt19937_64& rng, double max_cond) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Eigen::MatrixXd g = random_gaussian(d, d, rng);
    const SymMatrix m(g * g.transpose() +
                      1e-3 * Eigen::MatrixXd::Identity(d, d));
    if (max_cond <= 0.0) return m;
    const auto sd = spectral_decompose(m);
    if (sd.eigenvalues[0] <= max_cond * sd.eigenvalues[d - 1]) return m;
  }
  throw Error("random_pd: condition cap not met after 1000 attempts");
}

SymMatrix random_pd_conditioned(Eigen::Index d, std::mt19937_64& rng) {
  const Eigen::MatrixXd g = random_gaussian(d, d, rng);
  const SymMatrix base(g * g.transpose());
  const double lam_max = spectral_decompose(base).eigenvalues[0];
  const double ridge = std::max(lam_max / 30.0, 0.2) + 1e-3;
  return SymMatrix(base.mat() + ridge * Eigen::MatrixXd::Identity(d, d));
}

DesignInstance random_instance(int n, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rank_dist(1, static_cast<int>(d));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<SymMatrix> mats;
    mats.reserve(n);
    for (int i = 0; i < n; ++i) {
      const Eigen::MatrixXd g = random_gaussian(d, rank_dist(rng), rng);
      const SymMatrix raw(g * g.transpose());
      // Unit average eigenvalue per point; the iterates are scale-invariant
      // but the oracles appreciate a common magnitude.
      mats.push_back(raw * (static_cast<double>(d) / raw.trace()));
    }
    SymMatrix total = SymMatrix::zero(d);
    for (const auto& a : mats) total = total + a;
    if (is_pd(total)) return DesignInstance(std::move(mats));
  }
  throw Error("random_instance: failed to draw an instance with sum A_i > 0");
}

Weights random_interior_weights(int n, std::mt19937_64& rng) {
  // Exponential spacings give a uniform draw from the simplex interior.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    w[i] = -std::log(u);
  }
  return Weights(std::move(w));
}

}  // namespace madesign
