#pragma once

// Random-linear-functional rounding: maximize Σ tr(G_i Z_i) over a relaxation
// and test the optimizer for exact membership in the solution variety.

#include "iep/relax.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iep {

/// q independent functionals G_i = (H + Hᵀ)/2, H i.i.d. N(0,1).
std::vector<SymMatrix> sample_functional(std::uint64_t seed, int q, int n);

/// One Gaussian G applied to X = Σ λ_i Z_i, i.e. G_i = λ_i G.
std::vector<SymMatrix> sample_spectral_functional(std::uint64_t seed, const Spectrum& spectrum);

enum class FunctionalMode { Spectral, Independent };

std::string to_string(FunctionalMode m);
FunctionalMode parse_functional_mode(const std::string& s);

std::vector<SymMatrix> sample_functional(std::uint64_t seed, const Spectrum& spectrum, FunctionalMode mode);

struct RoundingOptions {
  Level level = Level::R1;
  double tau = kDefaultMembershipTol;       ///< residual acceptance
  double tau_spec = kDefaultMembershipTol;  ///< spectrum acceptance
  FunctionalMode mode = FunctionalMode::Spectral;
  SolverOptions solver;
  RelaxOptions relax;
  int jobs = 1;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  Level level = Level::R1;
  SolveStatus status = SolveStatus::MaxIter;
  Residuals residuals;
  std::vector<double> eigenvalues;  ///< ascending λ(X)
  double spectrum_error = 0.0;      ///< ||λ(X) − expanded Λ||_∞
  bool accepted = false;
  double wall_time_s = 0.0;
  int iterations = 0;
  std::optional<CandidateSolution> candidate;
};

struct RoundingReport {
  Level level = Level::R1;
  int trials = 0;
  int successes = 0;
  std::vector<TrialRecord> records;  ///< sorted by seed
};

/// Builds the level's program once and reuses the factored solver for every
/// trial. trial() is safe to call concurrently.
class Rounder {
 public:
  Rounder(const IEPInstance& inst, RoundingOptions opts = {});

  TrialRecord trial(std::uint64_t seed) const;
  RoundingReport run(int trials, std::uint64_t base_seed) const;

  const BuiltProgram& program() const { return built_; }

 private:
  IEPInstance inst_;
  RoundingOptions opts_;
  BuiltProgram built_;
  ConicSolver solver_;
};

/// Applies the acceptance rule to a decoded candidate.
void judge(const IEPInstance& inst, const CandidateSolution& cand, double tau, double tau_spec,
           TrialRecord& rec);

TrialRecord round_once(const IEPInstance& inst, Level level, std::uint64_t seed,
                       RoundingOptions opts = {});
RoundingReport round_many(const IEPInstance& inst, Level level, int trials, std::uint64_t base_seed,
                          RoundingOptions opts = {});

std::string report_to_json(const RoundingReport& rep, bool include_matrices = false);
/// One row per trial. Wall times are left out so reruns compare equal.
std::string report_to_csv(const RoundingReport& rep);

/// Brute-force feasibility for n = 2 with two simple eigenvalues: scans
/// X(θ) = R(θ) diag(λ₁, λ₂) R(θ)ᵀ over [0, π) at step 1e-4 and refines near
/// hits. True iff some θ meets every affine constraint within 1e-6.
bool oracle_feasible_n2(const IEPInstance& inst);

}  // namespace iep
