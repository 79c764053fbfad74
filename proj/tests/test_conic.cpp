#include "helpers.hpp"
#include "iep/conic.hpp"

#include <doctest.h>

#include <cmath>

using namespace iep;

namespace {

ConicProgram scalar_program(double b) {
  ConicProgram p;
  p.cone.blocks = {{ConeKind::PSD, 1}};
  p.A.resize(1, 1);
  p.A.insert(0, 0) = 1.0;
  p.b = Eigen::VectorXd::Constant(1, b);
  p.c = Eigen::VectorXd::Zero(1);
  return p;
}

}  // namespace

TEST_CASE("one-dimensional feasibility") {
  const ConicSolution s = solve(scalar_program(1.0));
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("one-dimensional infeasibility") {
  const ConicProgram p = scalar_program(-1.0);
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::PrimalInfeasible);
  REQUIRE(s.certificate);
  CHECK((*s.certificate)[0] == doctest::Approx(1.0));

  const Eigen::VectorXd y = Eigen::VectorXd::Ones(1);
  CHECK(verify_farkas(p, y, 1e-9).valid);
  CHECK(verify_farkas(p, 10.0 * y, 1e-9).valid);
  const FarkasReport zero = verify_farkas(p, Eigen::VectorXd::Zero(1), 1e-9);
  CHECK_FALSE(zero.valid);
  CHECK(zero.btY == 0.0);
  CHECK_FALSE(verify_farkas(p, -y, 1e-9).valid);
  CHECK_THROWS_AS(verify_farkas(p, Eigen::VectorXd::Zero(2), 1e-9), Error);
}

TEST_CASE("minimize -tr X over a 2x2 slice") {
  // X = [[a, 0.4], [0.4, 1 − a]] ⪰ 0 has trace 1 for every feasible a
  ConicProgram p;
  p.cone.blocks = {{ConeKind::PSD, 2}};
  p.A.resize(2, 3);
  p.A.insert(0, svec_index(0, 0, 2)) = 1.0;
  p.A.insert(0, svec_index(1, 1, 2)) = 1.0;
  p.A.insert(1, svec_index(0, 1, 2)) = 1.0 / std::sqrt(2.0);
  p.b = Eigen::Vector2d(1.0, 0.4);
  p.c = -svec(SymMatrix::identity(2));
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-6));
  const SymMatrix x = smat(s.x);
  CHECK(x(0, 1) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(eigenvalues(x)[0] >= -1e-7);
}

TEST_CASE("free blocks and a bounded LP") {
  // minimize x0 + 2 x1 with x0 + x1 = 1, x0, x1 ≥ 0 (PSD(1) each), plus a free t = x0 − x1
  ConicProgram p;
  p.cone.blocks = {{ConeKind::PSD, 1}, {ConeKind::PSD, 1}, {ConeKind::Free, 1}};
  p.A.resize(2, 3);
  p.A.insert(0, 0) = 1;
  p.A.insert(0, 1) = 1;
  p.A.insert(1, 0) = 1;
  p.A.insert(1, 1) = -1;
  p.A.insert(1, 2) = -1;
  p.b = Eigen::Vector2d(1, 0);
  p.c = Eigen::Vector3d(1, 2, 0);
  const ConicSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.x[2] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("unbounded objective is dual infeasible") {
  ConicProgram p;
  p.cone.blocks = {{ConeKind::PSD, 1}, {ConeKind::PSD, 1}};
  p.A.resize(1, 2);
  p.A.insert(0, 0) = 1;
  p.A.insert(0, 1) = -1;
  p.b = Eigen::VectorXd::Zero(1);
  p.c = Eigen::Vector2d(-1, 0);
  CHECK(solve(p).status == SolveStatus::DualInfeasible);
}

TEST_CASE("duplicate and zero rows") {
  ConicProgram p;
  p.cone.blocks = {{ConeKind::PSD, 2}};
  p.A.resize(4, 3);
  p.A.insert(0, 0) = 1;
  p.A.insert(1, 0) = 1;
  p.A.insert(3, 2) = 1;
  p.b = Eigen::Vector4d(1, 1, 0, 2);
  p.c = Eigen::VectorXd::Zero(3);
  CHECK(solve(p).status == SolveStatus::Optimal);

  p.b[1] = 2;
  const ConicSolution dup = solve(p);
  REQUIRE(dup.status == SolveStatus::PrimalInfeasible);
  CHECK(verify_farkas(p, *dup.certificate, 1e-9).valid);

  p.b[1] = 1;
  p.b[2] = 1;
  const ConicSolution zero = solve(p);
  REQUIRE(zero.status == SolveStatus::PrimalInfeasible);
  CHECK(verify_farkas(p, *zero.certificate, 1e-9).valid);
}

TEST_CASE("malformed programs are errors") {
  ConicProgram p = scalar_program(1.0);
  p.b = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(solve(p), Error);
  ConeSpec bad;
  bad.blocks = {{ConeKind::PSD, 0}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("reusable solver gives the same answer as a fresh one") {
  ConicProgram p = scalar_program(2.0);
  const ConicSolver solver(p.cone, p.A);
  const ConicSolution a = solver.solve(p.b, p.c);
  const ConicSolution b = solve(p);
  CHECK(a.status == b.status);
  CHECK(a.x[0] == b.x[0]);
  CHECK(solver.solve(Eigen::VectorXd::Constant(1, -3.0), p.c).status == SolveStatus::PrimalInfeasible);
}

TEST_CASE("cone helpers") {
  ConeSpec k;
  k.blocks = {{ConeKind::PSD, 2}, {ConeKind::Free, 2}};
  CHECK(k.dim() == 5);
  CHECK(k.offsets() == std::vector<int>{0, 3});
  Eigen::VectorXd v(5);
  v << -1, 0, 2, 7, -7;
  CHECK(cone_distance(k, v) == doctest::Approx(1.0));
  CHECK(dual_cone_distance(k, v) == doctest::Approx(std::sqrt(1.0 + 49 + 49)));
  const Eigen::VectorXd pr = project_cone(k, v);
  CHECK(pr[0] == doctest::Approx(0.0));
  CHECK(pr[3] == 7.0);
}

TEST_CASE("program_to_json carries the data") {
  const std::string j = program_to_json(scalar_program(1.0));
  CHECK(j.find("\"b\"") != std::string::npos);
  CHECK(j.find("\"psd\"") != std::string::npos);
}
