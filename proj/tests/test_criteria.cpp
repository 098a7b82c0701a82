#include <cmath>
#include <random>

#include "doctest.h"
#include "madesign/criteria.hpp"
#include "madesign/verification.hpp"

using namespace madesign;

namespace {

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

std::vector<Criterion> builtin_criteria(int d, std::mt19937_64& rng) {
  Eigen::VectorXd c = random_gaussian(d, 1, rng).col(0);
  if (c.isZero(0.0)) c[0] = 1.0;
  return {Criterion::D(), Criterion::A(), Criterion::PMean(0.5), Criterion::PMean(2.0),
          Criterion::CVector(c)};
}

}  // namespace

TEST_CASE("eval_phi worked values") {
  CHECK(eval_phi(Criterion::D(), SymMatrix::identity(4)) == doctest::Approx(0.0));

  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  CHECK(eval_phi(Criterion::A(), SymMatrix::from_diagonal(half)) ==
        doctest::Approx(-4.0));

  Eigen::VectorXd singular(2);
  singular << 1, 0;
  CHECK(eval_phi(Criterion::A(), SymMatrix::from_diagonal(singular)) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("eval_psi worked values") {
  Eigen::VectorXd e(2);
  e << std::exp(1.0), std::exp(1.0);
  CHECK(eval_psi(Criterion::D(), SymMatrix::from_diagonal(e)) == doctest::Approx(2.0));

  std::mt19937_64 rng(3);
  const SymMatrix m = random_pd(3, rng);
  CHECK(eval_psi(Criterion::A(), m) == doctest::Approx(m.trace()));

  Eigen::VectorXd squares(2);
  squares << 4, 9;
  CHECK(eval_psi(Criterion::PMean(0.5), SymMatrix::from_diagonal(squares)) ==
        doctest::Approx(5.0));
}

TEST_CASE("grad_phi closed forms on diagonal matrices") {
  Eigen::VectorXd diag(2);
  diag << 2, 4;
  const SymMatrix m = SymMatrix::from_diagonal(diag);
  const SymMatrix g = grad_phi(Criterion::D(), m);
  CHECK(g(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g(0, 1) == doctest::Approx(0.0));

  // Example 2's gradient pattern: grad phi_c contracted against e_i e_i^T.
  Eigen::VectorXd w(3);
  w << 0.2, 0.3, 0.5;
  Eigen::VectorXd c(3);
  c << 1, 1, 0;
  const SymMatrix gc = grad_phi(Criterion::CVector(c), SymMatrix::from_diagonal(w));
  CHECK(gc(0, 0) == doctest::Approx(1.0 / (0.2 * 0.2)).epsilon(1e-12));
  CHECK(gc(1, 1) == doctest::Approx(1.0 / (0.3 * 0.3)).epsilon(1e-12));
  CHECK(gc(2, 2) == doctest::Approx(0.0));

  CHECK_THROWS_AS(grad_phi(Criterion::D(), SymMatrix::from_diagonal(
                                               Eigen::Vector2d(1.0, 0.0))),
                  NotPD);
}

TEST_CASE("gradient identity, involution and trace contraction across criteria") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim_dist(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = dim_dist(rng);
    for (const Criterion& crit : builtin_criteria(d, rng)) {
      const SymMatrix m = random_pd_conditioned(d, rng);

      const SymMatrix direct = grad_phi(crit, m);
      const SymMatrix via = grad_phi_via_psi(crit, m);
      CHECK((direct - via).frobenius_norm() <= 1e-8 * direct.frobenius_norm());

      const SymMatrix fd = finite_difference_grad_phi(crit, m);
      CHECK((direct - fd).frobenius_norm() <= 1e-5 * direct.frobenius_norm());

      CHECK(rel_diff(t_transform_roundtrip(crit, m), eval_phi(crit, m)) <= 1e-10);

      const auto [lhs, rhs] = trace_contraction_check(crit, m);
      CHECK(rel_diff(lhs, rhs) <= 1e-10);
    }
  }
}

TEST_CASE("trace contraction worked values") {
  std::mt19937_64 rng(19);
  const SymMatrix m = random_pd(5, rng);
  const auto [lhs, rhs] = trace_contraction_check(Criterion::D(), m);
  CHECK(lhs == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(rhs == doctest::Approx(5.0).epsilon(1e-10));

  Eigen::VectorXd ab(2);
  ab << 0.7, 1.9;
  const auto [la, ra] =
      trace_contraction_check(Criterion::A(), SymMatrix::from_diagonal(ab));
  CHECK(la == doctest::Approx(1.0 / 0.7 + 1.0 / 1.9).epsilon(1e-12));
  CHECK(ra == doctest::Approx(la).epsilon(1e-12));
}

TEST_CASE("t transform roundtrip reproduces the worked optimum value") {
  Eigen::VectorXd half(2);
  half << 0.5, 0.5;
  CHECK(t_transform_roundtrip(Criterion::A(), SymMatrix::from_diagonal(half)) ==
        doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(t_transform_roundtrip(Criterion::D(), SymMatrix::identity(3)) ==
        doctest::Approx(0.0));
}

TEST_CASE("structural flags per criterion kind") {
  const auto d_flags = Criterion::D().flags();
  CHECK(d_flags.psi_isotonic);
  CHECK(d_flags.psi_concave);
  CHECK(d_flags.psi_strictly_isotonic);
  CHECK(d_flags.psi_strictly_concave);
  CHECK(d_flags.grad_positive_definite);

  const auto a_flags = Criterion::A().flags();
  CHECK(a_flags.psi_isotonic);
  CHECK(a_flags.psi_concave);
  CHECK_FALSE(a_flags.psi_strictly_isotonic);
  CHECK_FALSE(a_flags.psi_strictly_concave);
  CHECK(a_flags.grad_positive_definite);

  const auto p_half = Criterion::PMean(0.5).flags();
  CHECK(p_half.psi_strictly_concave);
  CHECK(p_half.psi_strictly_isotonic);

  const auto p_two = Criterion::PMean(2.0).flags();
  CHECK_FALSE(p_two.psi_concave);
  CHECK(p_two.grad_positive_definite);

  Eigen::VectorXd c(3);
  c << 1, 1, 0;
  CHECK_FALSE(Criterion::CVector(c).flags().grad_positive_definite);
}

TEST_CASE("flag soundness on random positive definite matrices") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> dim_dist(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    const int d = dim_dist(rng);
    for (const Criterion& crit : builtin_criteria(d, rng)) {
      const SymMatrix m = random_pd(d, rng);
      if (crit.flags().psi_isotonic) {
        CHECK(loewner_leq(SymMatrix::zero(d), grad_psi(crit, m)));
      }
      if (crit.flags().grad_positive_definite) {
        const auto sd = spectral_decompose(grad_phi(crit, m));
        CHECK(sd.eigenvalues[d - 1] > 0.0);
      }
      if (crit.flags().psi_concave) {
        const SymMatrix y = random_pd(d, rng);
        const double upper = eval_psi(crit, m) + inner(grad_psi(crit, m), y - m);
        CHECK(eval_psi(crit, y) <= upper + 1e-9);
      }
    }
  }
}

TEST_CASE("the exp fixture is neither convex nor concave in psi") {
  // phi(t) = -e^{-t} gives psi(t) = e^{-1/t}, convex on (0,1/2] and concave
  // beyond.
  CriterionFlags flags;
  flags.psi_isotonic = true;
  const Criterion crit = Criterion::Scalar1D(
      [](double t) { return -std::exp(-t); }, [](double t) { return std::exp(-t); },
      flags);
  CHECK_FALSE(crit.flags().psi_concave);

  const auto psi_at = [&](double t) {
    Eigen::MatrixXd m(1, 1);
    m << t;
    return eval_psi(crit, SymMatrix(m));
  };
  const double h = 1e-4;
  const auto second = [&](double t) {
    return (psi_at(t + h) - 2.0 * psi_at(t) + psi_at(t - h)) / (h * h);
  };
  CHECK(second(0.25) > 0.0);
  CHECK(second(1.0) < 0.0);

  // Direct values: psi(t) = e^{-1/t}.
  CHECK(psi_at(0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(eval_psi(crit, SymMatrix::identity(2)), DimensionMismatch);
}

TEST_CASE("a trace-g criterion with g = ln reproduces the D criterion") {
  CriterionFlags flags;
  flags.psi_isotonic = true;
  flags.psi_concave = true;
  const Criterion traced = Criterion::TraceG(
      [](double t) { return std::log(t); }, [](double t) { return 1.0 / t; }, flags);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix m = random_pd(4, rng, 1e4);
    CHECK(rel_diff(eval_phi(traced, m), eval_phi(Criterion::D(), m)) <= 1e-10);
    CHECK((grad_phi(traced, m) - grad_phi(Criterion::D(), m)).frobenius_norm() <=
          1e-8 * grad_phi(Criterion::D(), m).frobenius_norm());
  }
}

TEST_CASE("criterion grammar parses and round-trips") {
  CHECK(Criterion::parse("D").kind() == CriterionKind::D);
  CHECK(Criterion::parse("A").kind() == CriterionKind::A);
  const Criterion p = Criterion::parse("pmean:0.5");
  CHECK(p.kind() == CriterionKind::PMean);
  CHECK(p.p() == doctest::Approx(0.5));
  const Criterion c = Criterion::parse("c:1,1,0");
  CHECK(c.kind() == CriterionKind::CVector);
  CHECK(c.c().size() == 3);
  CHECK(c.c()[2] == 0.0);

  CHECK(Criterion::parse(Criterion::PMean(0.25).spec_string()).p() ==
        doctest::Approx(0.25));

  CHECK_THROWS_AS(Criterion::parse("E"), ParseError);
  CHECK_THROWS_AS(Criterion::parse("pmean:zero"), ParseError);
  CHECK_THROWS_AS(Criterion::parse("pmean:-1"), Error);
  CHECK_THROWS_AS(Criterion::parse("c:0,0"), ParseError);
  CHECK_THROWS_AS(Criterion::parse("c:1,oops"), ParseError);
}
