#pragma once

// Infeasibility certificates at the three relaxation levels, each re-checked
// with fresh arithmetic before it is reported.

#include "iep/relax.hpp"

#include <optional>
#include <string>

namespace iep {

inline constexpr double kCertifyTol = 1e-6;

enum class Verdict {
  Certified,     ///< verified infeasibility certificate
  Feasible,      ///< a feasible point of the relaxation was found
  Undetermined,  ///< iteration cap or numerical trouble
};

std::string to_string(Verdict v);

struct Cert1Check {
  double normalization = 0.0;  ///< |−tr A − Σ m_i d_i − Σ b_k ξ_k − 1|
  double coupling = 0.0;       ///< max_i ||A + d_i I + λ_i Σ ξ_k C_k − B_ii||_F
  double min_eig = 0.0;        ///< min_i λ_min(B_ii)
  bool ok = false;
};

/// Recomputes every Cert1 invariant from the matrices alone.
Cert1Check verify_cert1(const IEPInstance& inst, const Cert1& cert, double tol = kCertifyTol);

/// Value at (Z_1..Z_q) of the ideal element
///   tr(h_1 f_1) + Σ_i h_2 f_2 + Σ_i tr(h_3 f_3) + Σ_k h_4 f_4
/// built from the certificate. For a valid certificate this equals
/// −1 − Σ_i tr(Z_i B_ii Z_i) at every point.
double cert1_ideal_value(const IEPInstance& inst, const Cert1& cert, const std::vector<SymMatrix>& Z);

struct Cert1Result {
  Verdict verdict = Verdict::Undetermined;
  std::optional<Cert1> cert;
  Cert1Check check;
  SolveStatus status = SolveStatus::MaxIter;
  std::string diagnostics;
};

/// Solves Alt-1. A certificate is returned only when it passes verify_cert1
/// at kCertifyTol.
Cert1Result certify_r1_infeasible(const IEPInstance& inst, const SolverOptions& opts = {});

struct LevelReport {
  Level level = Level::R1;
  Verdict verdict = Verdict::Undetermined;
  SolveStatus status = SolveStatus::MaxIter;
  FarkasReport farkas;
  std::optional<Eigen::VectorXd> witness;  ///< normalized Farkas y (bᵀy = −1)
  std::optional<CandidateSolution> point;  ///< decoded feasible point
  double primal_residual = 0.0;
  double solve_time_s = 0.0;
  int iterations = 0;
};

/// Solves the level's feasibility program. Infeasibility is reported only
/// with a Farkas witness that verify_farkas accepts at kCertifyTol.
LevelReport certify_level(const IEPInstance& inst, Level level, const SolverOptions& opts = {},
                          const RelaxOptions& relax = {});

/// The same decision on a prebuilt program whose factored solver is shared,
/// e.g. across a sweep that only changes b.
LevelReport certify_program(const ConicSolver& solver, const ConicProgram& p, const VariableLayout& layout,
                            Level level, const Spectrum& spectrum);

/// {"certificate": {"kind", "level", "fields", "residuals"}}
std::string cert1_to_json(const Cert1& cert, const Cert1Check& check);
std::string farkas_to_json(const LevelReport& rep);

}  // namespace iep
