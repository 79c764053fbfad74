#include "helpers.hpp"
#include "iep/experiments.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

using namespace iep;

namespace {

std::vector<double> descending(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

struct Named {
  std::string name;
  IEPInstance inst;
};

std::vector<Named> corpus() {
  std::vector<Named> out;
  out.push_back({"sturm-int", gen_sturm_liouville(5, {1, 2, 3, 4, 5})});
  out.push_back({"sturm-squares", gen_sturm_liouville(5, {1, 4, 9, 16, 25})});
  out.push_back({"toeplitz5", gen_toeplitz(5, Spectrum({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}))});
  out.push_back({"empty-host", gen_induced_subgraph(SymMatrix::zero(7), octahedral_graph())});
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    out.push_back({"random-" + std::to_string(seed), gen_random(3, Spectrum({{-1, 1}, {0, 1}, {1, 1}}), 4, seed)});
  std::mt19937_64 rng(99);
  const double d[] = {-2, 1, 1, 3};
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    out.push_back({"planted-" + std::to_string(seed),
                   gen_random(4, Spectrum({{-2, 1}, {1, 2}, {3, 1}}), 6, 50 + seed,
                              testing::orthogonal_conjugate(SymMatrix::diagonal(d), rng))});
  return out;
}

}  // namespace

TEST_CASE("svec is an isometry") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int k = 0; k < 1000; ++k) {
    const int n = dim(rng);
    const SymMatrix a = testing::random_sym(n, rng, -5, 5), b = testing::random_sym(n, rng, -5, 5);
    const double scale = 1.0 + a.frobenius_norm() * b.frobenius_norm();
    CHECK(std::abs(svec(a).dot(svec(b)) - inner(a, b)) <= 1e-12 * scale);
    CHECK((smat(svec(a)) - a).frobenius_norm() <= 1e-14 * (1.0 + a.frobenius_norm()));
  }
}

TEST_CASE("eigh residuals") {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 20; ++n)
    for (int rep = 0; rep < 10; ++rep) {
      const SymMatrix m = testing::random_sym(n, rng, -10, 10);
      for (EigenMethod method : {EigenMethod::Jacobi, EigenMethod::Tridiagonal}) {
        const EigenDecomposition e = eigh(m, {method});
        const Eigen::MatrixXd& Q = e.vectors;
        CHECK((m.dense() * Q - Q * e.values.asDiagonal()).norm() <= 1e-10);
        CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-10);
        CHECK(std::is_sorted(e.values.data(), e.values.data() + n));
      }
    }
}

TEST_CASE("Moreau decomposition") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 15;
    const SymMatrix m = testing::random_sym(n, rng, -10, 10);
    const SymMatrix plus = project_psd(m);
    const SymMatrix minus = project_psd(-1.0 * m);
    CHECK((plus - minus - m).frobenius_norm() <= 1e-9);
    CHECK(std::abs(inner(plus, minus)) <= 1e-9);
    CHECK(eigenvalues(plus).minCoeff() >= -1e-9);
    CHECK((project_psd(plus) - plus).frobenius_norm() <= 1e-9);
  }
}

TEST_CASE("certificates and feasible points exclude each other") {
  for (const auto& [name, inst] : corpus()) {
    CAPTURE(name);
    const Cert1Result c1 = certify_r1_infeasible(inst);
    std::vector<LevelReport> lv;
    std::vector<BuiltProgram> built;
    for (Level level : {Level::R1, Level::R2, Level::R2Plus}) {
      lv.push_back(certify_level(inst, level));
      built.push_back(build_level(inst, level));
    }
    if (c1.verdict == Verdict::Certified) {
      CHECK(verify_cert1(inst, *c1.cert).ok);
      CHECK(lv[0].verdict != Verdict::Feasible);
    }
    // R2+ ⊆ R2 ⊆ R1: infeasibility propagates up, feasibility down
    if (lv[0].verdict == Verdict::Certified) CHECK(lv[1].verdict == Verdict::Certified);
    if (lv[1].verdict == Verdict::Certified) CHECK(lv[2].verdict == Verdict::Certified);
    if (lv[2].verdict == Verdict::Feasible) CHECK(lv[1].verdict == Verdict::Feasible);
    if (lv[1].verdict == Verdict::Feasible) CHECK(lv[0].verdict == Verdict::Feasible);
    for (int k = 0; k < 3; ++k) {
      if (lv[k].verdict != Verdict::Certified) continue;
      CHECK(verify_farkas(built[k].program, *lv[k].witness, kCertifyTol).valid);
    }
    // a Cert1 identity evaluated at any feasible point would give −1 − SOS = 0
    if (c1.cert && lv[0].point) {
      CHECK(cert1_ideal_value(inst, *c1.cert, lv[0].point->Z) < -0.5);
    }
  }
}

TEST_CASE("decoded R1 points satisfy Schur-Horn") {
  for (const auto& [name, inst] : corpus()) {
    CAPTURE(name);
    if (certify_level(inst, Level::R1).verdict == Verdict::Certified) continue;
    RoundingOptions ro;
    ro.solver.eps = 1e-9;
    Rounder r(inst, ro);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const TrialRecord rec = r.trial(seed);
      REQUIRE(rec.candidate);
      const SymMatrix& X = rec.candidate->X;
      const std::vector<double> lam = inst.spectrum.expanded_descending();
      std::vector<double> diag(inst.n);
      for (int s = 0; s < inst.n; ++s) diag[s] = X(s, s);
      std::sort(diag.begin(), diag.end(), std::greater<>());
      CHECK(majorizes(lam, diag, 1e-6));
      CHECK(majorizes(lam, descending(eigenvalues(X)), 1e-6));
    }
  }
}

TEST_CASE("R1 matches brute force on 2 x 2 instances") {
  // Z_1 ranges over a disk whose boundary circle is the true region, and a
  // single constraint cuts out a line, which meets the disk exactly when it
  // meets the circle.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.0, 2.0);
  int agree = 0, undetermined = 0, feasible = 0;
  for (int k = 0; k < 200; ++k) {
    const double l1 = N(rng), gap = 0.5 + std::abs(N(rng));
    const Spectrum spec({{l1, 1}, {l1 + gap, 1}});
    const int ell = 1 + k % 3;
    const double r = U(rng) * gap / 2, th = U(rng) * M_PI;
    Eigen::MatrixXd x0(2, 2);
    x0 << std::cos(th), std::sin(th), std::sin(th), -std::cos(th);
    const SymMatrix X0 = SymMatrix::from_dense((l1 + gap / 2) * Eigen::MatrixXd::Identity(2, 2) + r * x0);
    IEPInstance inst = gen_random(2, spec, ell, 700 + k);
    for (auto& c : inst.constraints) c.b = inner(c.C, X0);

    const bool truth = oracle_feasible_n2(inst);
    feasible += truth;
    const LevelReport rep = certify_level(inst, Level::R1);
    if (rep.verdict == Verdict::Undetermined) {
      ++undetermined;
      continue;
    }
    if (truth) CHECK(rep.verdict == Verdict::Feasible);
    if (ell == 1) {
      CAPTURE(k);
      CHECK((rep.verdict == Verdict::Feasible) == truth);
    }
    agree += (rep.verdict == Verdict::Feasible) == truth;
    if (ell > 1 && rep.verdict == Verdict::Feasible) {
      const LevelReport p = certify_level(inst, Level::R2Plus);
      if (p.verdict == Verdict::Certified) CHECK_FALSE(truth);
      const RoundingReport rr = round_many(inst, Level::R1, 3, 10 * k);
      if (rr.successes > 0) CHECK(truth);
    }
  }
  CHECK(undetermined <= 2);
  CHECK(feasible > 20);
  CHECK(feasible < 180);
  MESSAGE("agree " << agree << " / 200, undetermined " << undetermined);
}

TEST_CASE("fixed seeds reproduce results") {
  const IEPInstance inst = gen_toeplitz(5, Spectrum({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}));
  RoundingOptions a, b;
  b.jobs = 3;
  CHECK(report_to_csv(round_many(inst, Level::R1, 6, 17, a)) == report_to_csv(round_many(inst, Level::R1, 6, 17, b)));
  ExperimentOptions e;
  e.jobs = 3;
  CHECK(grid_to_csv(run_grid_s3(3, 5, 4)) == grid_to_csv(run_grid_s3(3, 5, 4, e)));
  CHECK(instance_to_json(gen_random(4, Spectrum({{0, 2}, {1, 2}}), 3, 8)) ==
        instance_to_json(gen_random(4, Spectrum({{0, 2}, {1, 2}}), 3, 8)));
}
