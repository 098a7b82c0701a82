#include <cmath>
#include <random>

#include "doctest.h"
#include "madesign/symmat.hpp"
#include "madesign/verification.hpp"

using namespace madesign;

TEST_CASE("spectral decomposition of simple matrices") {
  const auto id = spectral_decompose(SymMatrix::identity(2));
  CHECK(id.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(id.eigenvalues[1] == doctest::Approx(1.0));

  Eigen::VectorXd diag(2);
  diag << 3, 1;
  const auto sd = spectral_decompose(SymMatrix::from_diagonal(diag));
  CHECK(sd.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(sd.eigenvalues[1] == doctest::Approx(1.0));
  // Axis eigenvectors up to sign.
  CHECK(std::abs(sd.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(sd.eigenvectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("spectral decomposition reconstructs and stays orthonormal") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 8);
    const Eigen::MatrixXd g = random_gaussian(d, d, rng);
    const SymMatrix m(g + g.transpose());
    const auto sd = spectral_decompose(m);

    const double rel =
        (sd.reconstruct() - m).frobenius_norm() / std::max(1e-300, m.frobenius_norm());
    CHECK(rel <= 1e-12);

    const Eigen::MatrixXd gram = sd.eigenvectors.transpose() * sd.eigenvectors;
    CHECK((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12);

    for (int i = 1; i < d; ++i) CHECK(sd.eigenvalues[i - 1] >= sd.eigenvalues[i]);
  }
}

TEST_CASE("spectral decomposition is deterministic") {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd g = random_gaussian(6, 6, rng);
  const SymMatrix m(g + g.transpose());
  const auto a = spectral_decompose(m);
  const auto b = spectral_decompose(m);
  CHECK((a.eigenvalues - b.eigenvalues).norm() == 0.0);
  CHECK((a.eigenvectors - b.eigenvectors).norm() == 0.0);
}

TEST_CASE("is_pd uses a relative threshold") {
  CHECK(is_pd(SymMatrix::identity(3), 1e-10));
  Eigen::VectorXd diag(2);
  diag << 1, 0;
  CHECK_FALSE(is_pd(SymMatrix::from_diagonal(diag), 1e-10));

  // Example 2's first iterate: diag(w1, w2, 0) is singular.
  Eigen::VectorXd w1(3);
  w1 << 0.4, 0.6, 0.0;
  CHECK_FALSE(is_pd(SymMatrix::from_diagonal(w1)));

  // Scale invariance: 1e8 * diag(1, 1e-12) has a tiny relative floor.
  Eigen::VectorXd scaled(2);
  scaled << 1e8, 1e-4;
  CHECK_FALSE(is_pd(SymMatrix::from_diagonal(scaled)));
  CHECK(is_pd(SymMatrix::from_diagonal(scaled), 1e-14));
}

TEST_CASE("loewner order basics") {
  const SymMatrix i2 = SymMatrix::identity(2);
  CHECK(loewner_leq(i2, i2 * 2.0));
  Eigen::VectorXd diag(2);
  diag << 2, 0;
  CHECK_FALSE(loewner_leq(SymMatrix::from_diagonal(diag), i2));
  CHECK_THROWS_AS(loewner_leq(i2, SymMatrix::identity(3)), DimensionMismatch);
}

TEST_CASE("mutual loewner domination pins the matrices together") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const SymMatrix a = random_pd(3, rng);
    const SymMatrix b(a.mat() + 1e-13 * Eigen::MatrixXd::Identity(3, 3));
    if (loewner_leq(a, b) && loewner_leq(b, a)) {
      CHECK((a - b).frobenius_norm() <=
            2e-10 * std::max(1.0, std::max(a.frobenius_norm(), b.frobenius_norm())));
    }
  }
}

TEST_CASE("inversion is antitonic on the positive definite cone") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 6);
    const SymMatrix a = random_pd(d, rng);
    const SymMatrix b = a + random_psd(d, rng);
    REQUIRE(loewner_leq(a, b));
    CHECK(loewner_leq(inverse_pd(b), inverse_pd(a)));
  }
}

TEST_CASE("t^p is matrix monotone for p in [0,1]") {
  std::mt19937_64 rng(37);
  const double powers[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 5);
    const SymMatrix a = random_pd(d, rng);
    const SymMatrix b = a + random_psd(d, rng);
    const double p = powers[trial % 5];
    const auto fn = [p](double t) { return std::pow(t, p); };
    CHECK(loewner_leq(matrix_fn(a, fn), matrix_fn(b, fn)));
  }
}

TEST_CASE("pseudo inverse on diagonal and full-rank matrices") {
  Eigen::VectorXd diag(2);
  diag << 2, 0;
  const SymMatrix pinv = pseudo_inverse(SymMatrix::from_diagonal(diag));
  CHECK(pinv(0, 0) == doctest::Approx(0.5));
  CHECK(pinv(1, 1) == 0.0);

  std::mt19937_64 rng(41);
  const SymMatrix m = random_pd(4, rng);
  const SymMatrix direct = inverse_pd(m);
  CHECK((pseudo_inverse(m) - direct).frobenius_norm() <=
        1e-10 * direct.frobenius_norm());

  CHECK_THROWS_AS(pseudo_inverse(SymMatrix::identity(2) * -1.0), NotPSD);
}

TEST_CASE("pseudo inverse reproduces the worked c-vector contraction") {
  // M = diag(w1, w2, 0), c = (1,1,0): c^T M^+ c = 1/w1 + 1/w2.
  Eigen::VectorXd w(3);
  w << 0.25, 0.5, 0.0;
  const SymMatrix pinv = pseudo_inverse(SymMatrix::from_diagonal(w));
  Eigen::VectorXd c(3);
  c << 1, 1, 0;
  CHECK(c.dot(pinv.mat() * c) == doctest::Approx(4.0 + 2.0).epsilon(1e-12));
}

TEST_CASE("pseudo inverse satisfies the Moore-Penrose identities") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 6);
    const int r = 1 + static_cast<int>(rng() % d);
    const Eigen::MatrixXd g = random_gaussian(d, r, rng);
    const SymMatrix m(g * g.transpose());
    const Eigen::MatrixXd mp = pseudo_inverse(m).mat();
    const Eigen::MatrixXd& mm = m.mat();
    const double scale = std::max(1.0, m.frobenius_norm());
    CHECK((mm * mp * mm - mm).norm() <= 1e-10 * scale);
    CHECK((mp * mm * mp - mp).norm() <= 1e-10 * std::max(1.0, mp.norm()));
    CHECK((mm * mp - (mm * mp).transpose()).norm() <= 1e-10 * scale * mp.norm());
    CHECK((mp * mm - (mp * mm).transpose()).norm() <= 1e-10 * scale * mp.norm());
  }
}

TEST_CASE("matrix_fn lifts scalar functions through the spectrum") {
  Eigen::VectorXd diag(2);
  diag << std::exp(1.0), std::exp(2.0);
  const SymMatrix logm =
      matrix_fn(SymMatrix::from_diagonal(diag), [](double t) { return std::log(t); });
  CHECK(logm(0, 0) == doctest::Approx(1.0));
  CHECK(logm(1, 1) == doctest::Approx(2.0));

  std::mt19937_64 rng(47);
  const SymMatrix m = random_pd(5, rng);
  const SymMatrix same = matrix_fn(m, [](double t) { return t; });
  CHECK((same - m).frobenius_norm() <= 1e-12 * m.frobenius_norm());

  const SymMatrix root = matrix_fn(m, [](double t) { return std::sqrt(t); });
  const SymMatrix squared(root.mat() * root.mat());
  CHECK((squared - m).frobenius_norm() <= 1e-10 * m.frobenius_norm());

  // g(M) commutes with M.
  const Eigen::MatrixXd comm = root.mat() * m.mat() - m.mat() * root.mat();
  CHECK(comm.norm() <= 1e-10 * m.frobenius_norm());

  Eigen::VectorXd bad(2);
  bad << 1, 0;
  CHECK_THROWS_AS(matrix_fn(SymMatrix::from_diagonal(bad), [](double t) { return t; }),
                  DomainError);
}

TEST_CASE("range_contains matches the feasibility-cone membership patterns") {
  std::mt19937_64 rng(53);
  CHECK(range_contains(SymMatrix::identity(3), random_gaussian(3, 2, rng)));

  Eigen::VectorXd diag(3);
  diag << 1, 1, 0;
  Eigen::MatrixXd c(3, 1);
  c << 1, 1, 0;
  CHECK(range_contains(SymMatrix::from_diagonal(diag), c));

  Eigen::VectorXd short_diag(3);
  short_diag << 1, 0, 0;
  CHECK_FALSE(range_contains(SymMatrix::from_diagonal(short_diag), c));
}

TEST_CASE("1x1 matrices work end to end") {
  Eigen::MatrixXd one(1, 1);
  one << 0.25;
  const SymMatrix m(one);
  CHECK(is_pd(m));
  CHECK(inverse_pd(m)(0, 0) == doctest::Approx(4.0));
  CHECK(spectral_decompose(m).eigenvalues[0] == doctest::Approx(0.25));
}

TEST_CASE("symmetrization makes the two triangles identical") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.3000000001, 0.3, 2.0;
  const SymMatrix m(a);
  CHECK(m(0, 1) == m(1, 0));
}
