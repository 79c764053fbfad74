#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace iep;

TEST_CASE("svec scales off-diagonals by sqrt 2") {
  SymMatrix m(2);
  m.set(0, 0, 1);
  m.set(0, 1, 2);
  m.set(1, 1, 3);
  const Eigen::VectorXd v = svec(m);
  REQUIRE(v.size() == 3);
  CHECK(v[svec_index(0, 0, 2)] == 1.0);
  CHECK(v[svec_index(0, 1, 2)] == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(v[svec_index(1, 1, 2)] == 3.0);
}

TEST_CASE("svec of the identity") {
  const Eigen::VectorXd v = svec(SymMatrix::identity(3));
  CHECK(v.sum() == 3.0);
  for (int s = 0; s < 3; ++s) CHECK(v[svec_index(s, s, 3)] == 1.0);
}

TEST_CASE("svec dot product equals trace of the product") {
  std::mt19937_64 rng(11);
  const SymMatrix a = testing::random_sym(5, rng), b = testing::random_sym(5, rng);
  const double tr = (a.dense() * b.dense()).trace();
  CHECK(std::abs(svec(a).dot(svec(b)) - tr) <= 1e-12);
  CHECK((smat(svec(a)) - a).frobenius_norm() <= 1e-15);
}

TEST_CASE("svec_index enumerates the upper triangle row by row") {
  int k = 0;
  for (int s = 0; s < 4; ++s)
    for (int t = s; t < 4; ++t) CHECK(svec_index(s, t, 4) == k++);
  CHECK(svec_index(3, 1, 4) == svec_index(1, 3, 4));
  CHECK(svec_order(10) == 4);
  CHECK_THROWS_AS(svec_order(7), Error);
}

TEST_CASE("basis_f") {
  const SymMatrix f11 = basis_f(0, 0, 2);
  CHECK(f11(0, 0) == 1.0);
  CHECK(f11(1, 1) == 0.0);
  const SymMatrix f12 = basis_f(0, 1, 2);
  CHECK(f12(0, 1) == 0.5);
  CHECK(f12(1, 0) == 0.5);
  CHECK(f12(0, 0) == 0.0);
  CHECK(basis_f(1, 0, 2) == f12);
  CHECK_THROWS_AS(basis_f(0, 2, 2), Error);

  std::mt19937_64 rng(3);
  const SymMatrix x = testing::random_sym(4, rng);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) CHECK(inner(basis_f(s, t, 4), x) == doctest::Approx(x(s, t)).epsilon(1e-15));
  for (int s = 0; s < 4; ++s)
    for (int t = s; t < 4; ++t) CHECK((svec_basis_f(s, t, 4) - svec(basis_f(s, t, 4))).norm() == 0.0);
}

TEST_CASE("from_dense rejects asymmetric input") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2.0000001, 1;
  CHECK_THROWS_AS(SymMatrix::from_dense(m), Error);
  m(1, 0) = 2;
  CHECK_NOTHROW(SymMatrix::from_dense(m));
}

TEST_CASE("eigh small closed forms") {
  const auto id = eigh(SymMatrix::identity(4));
  for (int k = 0; k < 4; ++k) CHECK(id.values[k] == doctest::Approx(1.0));

  SymMatrix swap(2);
  swap.set(0, 1, 1);
  const auto e = eigh(swap);
  CHECK(e.values[0] == doctest::Approx(-1.0));
  CHECK(e.values[1] == doctest::Approx(1.0));
}

TEST_CASE("octahedral adjacency spectrum") {
  // characteristic polynomial of K_{2,2,2}: (x − 4) x³ (x + 2)²
  SymMatrix a(6);
  for (int s = 0; s < 6; ++s)
    for (int t = s + 1; t < 6; ++t)
      if (t != s + 3) a.set(s, t, 1.0);
  const Eigen::VectorXd ev = eigenvalues(a);
  const double want[] = {-2, -2, 0, 0, 0, 4};
  for (int k = 0; k < 6; ++k) CHECK(std::abs(ev[k] - want[k]) <= 1e-12);
  for (double x : {0.5, 1.5, -1.0, 3.0}) {
    const double charpoly = (x - 4) * x * x * x * (x + 2) * (x + 2);
    const double det = (x * Eigen::MatrixXd::Identity(6, 6) - a.dense()).determinant();
    CHECK(det == doctest::Approx(charpoly).epsilon(1e-10));
  }
}

TEST_CASE("tridiagonal and Jacobi agree") {
  std::mt19937_64 rng(5);
  for (int n : {1, 2, 3, 7, 15}) {
    const SymMatrix m = testing::random_sym(n, rng, -10, 10);
    const auto a = eigh(m, {EigenMethod::Jacobi});
    const auto b = eigh(m, {EigenMethod::Tridiagonal});
    CHECK((a.values - b.values).norm() <= 1e-10 * (1 + m.frobenius_norm()));
  }
}

TEST_CASE("Jacobi sweep cap is reported") {
  std::mt19937_64 rng(9);
  const SymMatrix m = testing::random_sym(8, rng);
  EigenOptions o;
  o.max_sweeps = 1;
  CHECK_THROWS_AS(eigh(m, o), NonConvergence);
}

TEST_CASE("project_psd") {
  const double d[] = {-1.0, 2.0};
  const SymMatrix p = project_psd(SymMatrix::diagonal(d));
  CHECK(p(0, 0) == doctest::Approx(0.0));
  CHECK(p(1, 1) == doctest::Approx(2.0));
  CHECK(p(0, 1) == doctest::Approx(0.0));

  CHECK(project_psd(-1.0 * SymMatrix::identity(3)).frobenius_norm() <= 1e-12);

  std::mt19937_64 rng(2);
  const SymMatrix g = testing::random_sym(4, rng);
  const SymMatrix psd = SymMatrix::symmetrized(g.dense() * g.dense());
  CHECK((project_psd(psd) - psd).frobenius_norm() <= 1e-10);
}

TEST_CASE("project_psd_svec matches project_psd") {
  std::mt19937_64 rng(4);
  Eigen::MatrixXd scratch;
  for (int n : {1, 3, 6}) {
    const SymMatrix m = testing::random_sym(n, rng);
    Eigen::VectorXd v = svec(m);
    project_psd_svec(std::span<double>(v.data(), v.size()), scratch);
    CHECK((smat(v) - project_psd(m)).frobenius_norm() <= 1e-10);
  }
}

TEST_CASE("majorizes") {
  const double a[] = {1, 0, -1};
  const double b1[] = {0.5, 0.5, -1};
  const double b2[] = {1.2, -0.2, -1};
  const double shortv[] = {1, 0};
  CHECK(majorizes(a, b1, 0.0));
  CHECK(majorizes(a, a, 0.0));
  CHECK_FALSE(majorizes(a, b2, 1e-9));
  CHECK_THROWS_AS(majorizes(a, shortv, 0.0), Error);
}
