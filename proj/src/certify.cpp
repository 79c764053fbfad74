#include "iep/certify.hpp"

#include <json.hpp>

#include <cmath>

namespace iep {

using nlohmann::json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified-infeasible";
    case Verdict::Feasible: return "feasible";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

Cert1Check verify_cert1(const IEPInstance& inst, const Cert1& cert, double tol) {
  const int n = inst.n, q = inst.q(), ell = inst.ell();
  if (cert.A.n() != n || cert.d.size() != q || cert.xi.size() != ell ||
      static_cast<int>(cert.B.size()) != q)
    throw Error("verify_cert1: certificate shape does not match the instance");

  Cert1Check out;
  double norm = -cert.A.trace();
  for (int i = 0; i < q; ++i) norm -= inst.spectrum.mult(i) * cert.d[i];
  for (int k = 0; k < ell; ++k) norm -= inst.constraints[k].b * cert.xi[k];
  out.normalization = std::abs(norm - 1.0);

  Eigen::MatrixXd xiC = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < ell; ++k) xiC += cert.xi[k] * inst.constraints[k].C.dense();

  out.min_eig = std::numeric_limits<double>::infinity();
  for (int i = 0; i < q; ++i) {
    const Eigen::MatrixXd r = cert.A.dense() + cert.d[i] * Eigen::MatrixXd::Identity(n, n) +
                              inst.spectrum.value(i) * xiC - cert.B[i].dense();
    out.coupling = std::max(out.coupling, r.norm());
    out.min_eig = std::min(out.min_eig, eigenvalues(cert.B[i])[0]);
  }
  out.ok = out.normalization <= tol && out.coupling <= tol && out.min_eig >= -tol;
  return out;
}

double cert1_ideal_value(const IEPInstance& inst, const Cert1& cert, const std::vector<SymMatrix>& Z) {
  const int n = inst.n, q = inst.q();
  if (static_cast<int>(Z.size()) != q) throw Error("cert1_ideal_value: wrong number of blocks");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sumZ = -I;
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < q; ++i) {
    sumZ += Z[i].dense();
    X += inst.spectrum.value(i) * Z[i].dense();
  }
  // h_1 = −A, h_2 = −d, h_3 = −B, h_4 = −ξ
  double v = -(cert.A.dense().cwiseProduct(sumZ)).sum();
  for (int i = 0; i < q; ++i) {
    const Eigen::MatrixXd& z = Z[i].dense();
    v -= cert.d[i] * (z.trace() - inst.spectrum.mult(i));
    v -= cert.B[i].dense().cwiseProduct(z * z - z).sum();
  }
  for (int k = 0; k < inst.ell(); ++k)
    v -= cert.xi[k] * (inst.constraints[k].C.dense().cwiseProduct(X).sum() - inst.constraints[k].b);
  return v;
}

Cert1Result certify_r1_infeasible(const IEPInstance& inst, const SolverOptions& opts) {
  const BuiltProgram bp = build_alt1(inst);
  const ConicSolution sol = solve(bp.program, opts);
  Cert1Result out;
  out.status = sol.status;
  if (sol.status == SolveStatus::Optimal) {
    Decoded dec = decode(bp.layout, sol.x, inst.spectrum);
    out.check = verify_cert1(inst, *dec.cert1);
    if (out.check.ok) {
      out.verdict = Verdict::Certified;
      out.cert = std::move(dec.cert1);
    } else {
      out.diagnostics = "Alt-1 point failed re-verification";
    }
  } else if (sol.status == SolveStatus::PrimalInfeasible) {
    out.verdict = Verdict::Feasible;
    out.diagnostics = "Alt-1 is infeasible, so R1 is nonempty";
  } else {
    out.diagnostics = "Alt-1 solve ended with " + to_string(sol.status);
  }
  return out;
}

LevelReport certify_program(const ConicSolver& solver, const ConicProgram& p, const VariableLayout& layout,
                            Level level, const Spectrum& spectrum) {
  const ConicSolution sol = solver.solve(p.b, Eigen::VectorXd::Zero(p.num_vars()));
  LevelReport rep;
  rep.level = level;
  rep.status = sol.status;
  rep.solve_time_s = sol.solve_time_s;
  rep.iterations = sol.iterations;
  if (sol.status == SolveStatus::PrimalInfeasible && sol.certificate) {
    rep.farkas = verify_farkas(p, *sol.certificate, kCertifyTol);
    if (rep.farkas.valid) {
      rep.verdict = Verdict::Certified;
      rep.witness = rep.farkas.scale * *sol.certificate;
    }
  } else if (sol.status == SolveStatus::Optimal) {
    rep.verdict = Verdict::Feasible;
    rep.primal_residual = sol.residuals.primal;
    rep.point = decode(layout, sol.x, spectrum).candidate;
  }
  return rep;
}

LevelReport certify_level(const IEPInstance& inst, Level level, const SolverOptions& opts,
                          const RelaxOptions& relax) {
  const BuiltProgram bp = build_level(inst, level, relax);
  const ConicSolver solver(bp.program.cone, bp.program.A, opts);
  return certify_program(solver, bp.program, bp.layout, level, inst.spectrum);
}

namespace {

json matrix_json(const SymMatrix& m) {
  json rows = json::array();
  for (int s = 0; s < m.n(); ++s) {
    json row = json::array();
    for (int t = 0; t < m.n(); ++t) row.push_back(m(s, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string cert1_to_json(const Cert1& cert, const Cert1Check& check) {
  json fields;
  fields["A"] = matrix_json(cert.A);
  fields["d"] = to_std(cert.d);
  fields["xi"] = to_std(cert.xi);
  json B = json::array();
  for (const auto& b : cert.B) B.push_back(matrix_json(b));
  fields["B"] = std::move(B);
  json doc;
  doc["certificate"] = {
      {"kind", "cert1"},
      {"level", "r1"},
      {"fields", std::move(fields)},
      {"residuals",
       {{"normalization", check.normalization}, {"coupling", check.coupling}, {"min_eig", check.min_eig}}},
      {"verified", check.ok}};
  return doc.dump(2);
}

std::string farkas_to_json(const LevelReport& rep) {
  json doc;
  json fields;
  if (rep.witness) fields["y"] = to_std(*rep.witness);
  doc["certificate"] = {
      {"kind", "farkas"},
      {"level", to_string(rep.level)},
      {"fields", std::move(fields)},
      {"residuals", {{"dual_cone_distance", rep.farkas.cone_distance}, {"bty", rep.farkas.btY}}},
      {"verified", rep.verdict == Verdict::Certified}};
  return doc.dump(2);
}

}  // namespace iep
