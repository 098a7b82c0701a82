#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "madesign/solver.hpp"

namespace madesign {

// ---------------------------------------------------------------------------
// Independent gradient oracle
// ---------------------------------------------------------------------------

/// Project-wide finite-difference convention: central differences along the
/// symmetric basis directions E_ij = (e_i e_j^T + e_j e_i^T)/(1+delta_ij)
/// with step h = 1e-5 * max(1, ||M||_F). Uses only eval_phi, so it stays
/// independent of every closed-form gradient path.
SymMatrix finite_difference_grad_phi(const Criterion& crit, const SymMatrix& m);

/// Central finite differences of v -> Phi(M(v)) in the coordinate
/// directions, step 1e-5. v is a raw coefficient vector; the steps leave
/// the simplex, which Phi tolerates.
Eigen::VectorXd finite_difference_gradient_f(const DesignInstance& inst,
                                             const Criterion& crit,
                                             const Eigen::VectorXd& v);

/// The objective evaluated in extended precision (D, A, p-mean and c-vector
/// criteria). Strict-increase comparisons between nearby iterates have true
/// deltas below one double ulp of f; this resolves them.
long double objective_extended(const DesignInstance& inst, const Criterion& crit,
                               const Eigen::VectorXd& w);

// ---------------------------------------------------------------------------
// Matrix Cauchy-Schwarz checkers
// ---------------------------------------------------------------------------

struct McsResult {
  bool holds = false;
  bool equality = false;
};

/// Evaluate both sides of
///   sum B_i B_i^T >= (sum B_i A_i^T)(sum A_i A_i^T)^{-1}(sum A_i B_i^T)
/// for A_i in R^{q x p}, B_i in R^{d x p}. `holds` uses the Loewner test with
/// relative tolerance tol; `equality` is true iff ||B_i - C A_i||_F <= tol
/// for all i with C = (sum B_i A_i^T)(sum A_i A_i^T)^{-1}.
McsResult mcs_check(const std::vector<Eigen::MatrixXd>& a_list,
                    const std::vector<Eigen::MatrixXd>& b_list, double tol);

/// The corollary form: for V_i >= 0 and alpha, beta >= 0 with
/// sum alpha_i V_i > 0,
///   sum beta_i V_i >= (sum sqrt(alpha_i beta_i) V_i)(sum alpha_i V_i)^{-1}
///                     (sum sqrt(alpha_i beta_i) V_i).
McsResult corollary_cs_check(const std::vector<SymMatrix>& v_list,
                             const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& beta, double tol);

// ---------------------------------------------------------------------------
// Brute-force simplex oracle
// ---------------------------------------------------------------------------

/// Exhaustive search over the simplex lattice {w : w_i = k_i * grid_step}.
/// Evaluates the objective through the same code path as the solver; ties
/// break toward the lexicographically smallest w. Refuses n > 4.
std::pair<Weights, double> brute_force_optimum(const DesignInstance& inst,
                                               const Criterion& crit,
                                               double grid_step,
                                               const GeneralizedSpec* spec = nullptr);

// ---------------------------------------------------------------------------
// Worked-example reproductions
// ---------------------------------------------------------------------------

/// Closed form of the two-point fixed-point map
///   F_lambda(w) = (w_1^{1-2l}, w_2^{1-2l}) / (w_1^{1-2l} + w_2^{1-2l}).
/// Errors on boundary points.
std::array<double, 2> example1_map(const std::array<double, 2>& w, double lambda);

struct RateReport {
  std::vector<double> ratios;  // (f*-f(w^{k+1})) / (f*-f(w^k))
  double max_ratio = 0.0;
  double bound = 0.0;  // |1-2*lambda|
  bool satisfied = false;
};

/// Per-iteration objective-gap contraction against the |1-2*lambda| bound.
/// Ratios are only formed where the denominator gap exceeds 1e-13. Refuses
/// lambda = 1 (no contraction claim there).
RateReport linear_rate_check(const std::vector<IterationRecord>& trace,
                             double f_star, double lambda);

// ---------------------------------------------------------------------------
// Bundled worked instances
// ---------------------------------------------------------------------------

/// n = d = 2, A_i = e_i e_i^T, A-criterion; optimum (1/2,1/2), f* = -4.
DesignInstance example1_instance();
Criterion example1_criterion();

/// n = d = 3, A_i = e_i e_i^T, c-criterion with c = (1,1,0).
DesignInstance example2_instance();
Criterion example2_criterion();

/// The generalized-mode K for the same three-point instance: K = c.
GeneralizedSpec eq3d2_spec();

// ---------------------------------------------------------------------------
// Seeded random generators (Gaussian factor convention)
// ---------------------------------------------------------------------------

Eigen::MatrixXd random_gaussian(Eigen::Index rows, Eigen::Index cols,
                                std::mt19937_64& rng);

/// G G^T for a square Gaussian factor G.
SymMatrix random_psd(Eigen::Index d, std::mt19937_64& rng);

/// G G^T + 1e-3 I. With max_cond > 0, resamples until the condition number
/// is below the cap.
SymMatrix random_pd(Eigen::Index d, std::mt19937_64& rng, double max_cond = 0.0);

/// Gaussian-factor PD matrix with the ridge sized so that the finite
/// difference step h = 1e-5 * max(1, ||M||_F) stays far below the smallest
/// eigenvalue (condition number <= ~31, lambda_min >= 0.2).
SymMatrix random_pd_conditioned(Eigen::Index d, std::mt19937_64& rng);

/// n PSD information matrices G_i G_i^T with random ranks, resampled until
/// their sum is positive definite.
DesignInstance random_instance(int n, Eigen::Index d, std::mt19937_64& rng);

/// Uniformly distributed interior point of the simplex.
Weights random_interior_weights(int n, std::mt19937_64& rng);

}  // namespace madesign
