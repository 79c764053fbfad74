#include "helpers.hpp"
#include "iep/certify.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace iep;

namespace {

IEPInstance pinned_identity(int n) {
  IEPInstance inst;
  inst.n = n;
  inst.spectrum = Spectrum({{1.0, n}});
  inst.constraints.push_back({basis_f(0, 0, n), 0.0});
  return inst;
}

}  // namespace

TEST_CASE("Sturm-Liouville with eigenvalues 1..5 has a Cert1 certificate") {
  const IEPInstance inst = gen_sturm_liouville(5, {1, 2, 3, 4, 5});
  const Cert1Result r = certify_r1_infeasible(inst);
  REQUIRE(r.verdict == Verdict::Certified);
  REQUIRE(r.cert);
  const Cert1Check c = verify_cert1(inst, *r.cert, 1e-6);
  CHECK(c.ok);
  CHECK(c.normalization <= 1e-6);
  CHECK(c.coupling <= 1e-6);
  CHECK(c.min_eig >= -1e-6);
}

TEST_CASE("X = I with X00 = 0 is refuted by Cert1") {
  const Cert1Result r = certify_r1_infeasible(pinned_identity(3));
  CHECK(r.verdict == Verdict::Certified);
  CHECK(certify_level(pinned_identity(3), Level::R1).verdict == Verdict::Certified);
}

TEST_CASE("Toeplitz with eigenvalues 1..5 is not refuted at R1") {
  const IEPInstance inst = gen_toeplitz(5, Spectrum({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}));
  CHECK(certify_r1_infeasible(inst).verdict != Verdict::Certified);
  const LevelReport r = certify_level(inst, Level::R1);
  CHECK(r.verdict == Verdict::Feasible);
  REQUIRE(r.point);
  CHECK(r.primal_residual <= 1e-5);
}

TEST_CASE("planted instances are never certified") {
  std::mt19937_64 rng(8);
  const Spectrum spec({{-1, 1}, {0.5, 2}, {2, 1}});
  const double d[] = {-1, 0.5, 0.5, 2};
  for (int k = 0; k < 3; ++k) {
    const IEPInstance inst = gen_random(4, spec, 5, 40 + k, testing::orthogonal_conjugate(SymMatrix::diagonal(d), rng));
    CHECK(certify_r1_infeasible(inst).verdict != Verdict::Certified);
    for (Level level : {Level::R1, Level::R2, Level::R2Plus})
      CHECK(certify_level(inst, level).verdict == Verdict::Feasible);
  }
}

TEST_CASE("an edgeless host cannot contain the octahedron") {
  const IEPInstance inst = gen_induced_subgraph(SymMatrix::zero(8), octahedral_graph());
  const LevelReport r = certify_level(inst, Level::R1);
  REQUIRE(r.verdict == Verdict::Certified);
  REQUIRE(r.witness);
  const BuiltProgram bp = build_r1(inst);
  const FarkasReport f = verify_farkas(bp.program, *r.witness, kCertifyTol);
  CHECK(f.valid);
  CHECK(r.witness->dot(bp.program.b) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("the Cert1 ideal element is −1 − Σ tr(Z B Z)") {
  const IEPInstance inst = gen_sturm_liouville(5, {1, 2, 3, 4, 5});
  const Cert1Result r = certify_r1_infeasible(inst);
  REQUIRE(r.cert);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<SymMatrix> Z;
    double sos = 0.0;
    for (int i = 0; i < inst.q(); ++i) {
      Z.push_back(testing::random_sym(5, rng));
      sos += (Z[i].dense() * r.cert->B[i].dense() * Z[i].dense()).trace();
    }
    const double scale = 1.0 + sos;
    CHECK(cert1_ideal_value(inst, *r.cert, Z) == doctest::Approx(-1.0 - sos).epsilon(1e-5 * scale));
  }
}

TEST_CASE("verify_cert1 rejects tampering") {
  const IEPInstance inst = gen_sturm_liouville(5, {1, 2, 3, 4, 5});
  const Cert1Result r = certify_r1_infeasible(inst);
  REQUIRE(r.cert);

  Cert1 scaled = *r.cert;
  scaled.A *= 2.0;
  CHECK_FALSE(verify_cert1(inst, scaled).ok);

  Cert1 indefinite = *r.cert;
  indefinite.B[0] = -1.0 * SymMatrix::identity(5);
  const Cert1Check c = verify_cert1(inst, indefinite);
  CHECK_FALSE(c.ok);
  CHECK(c.min_eig <= -1.0 + 1e-12);

  Cert1 wrong = *r.cert;
  wrong.B.pop_back();
  CHECK_THROWS_AS(verify_cert1(inst, wrong), Error);
}

TEST_CASE("certificate JSON") {
  const IEPInstance inst = gen_sturm_liouville(5, {1, 2, 3, 4, 5});
  const Cert1Result r = certify_r1_infeasible(inst);
  REQUIRE(r.cert);
  const auto j = nlohmann::json::parse(cert1_to_json(*r.cert, r.check));
  CHECK(j["certificate"]["kind"] == "cert1");
  CHECK(j["certificate"]["verified"] == true);
  CHECK(j["certificate"]["fields"]["B"].size() == 5);
  CHECK(j["certificate"]["fields"]["A"].size() == 5);

  const LevelReport f = certify_level(gen_induced_subgraph(SymMatrix::zero(8), octahedral_graph()), Level::R1);
  const auto k = nlohmann::json::parse(farkas_to_json(f));
  CHECK(k["certificate"]["kind"] == "farkas");
  CHECK(k["certificate"]["level"] == "r1");
  CHECK(k["certificate"]["fields"]["y"].is_array());
}

TEST_CASE("verdict names") {
  CHECK(to_string(Verdict::Certified) == "certified-infeasible");
  CHECK(to_string(Verdict::Feasible) == "feasible");
  CHECK(to_string(Verdict::Undetermined) == "undetermined");
}
