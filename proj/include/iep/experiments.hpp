#pragma once

// Scripted reproductions: the S³ feasibility grid, the Sturm-Liouville and
// Toeplitz pipelines, induced-subgraph certification, and the Gaussian
// recovery threshold.

#include "iep/certify.hpp"
#include "iep/rounding.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iep {

struct ExperimentOptions {
  SolverOptions solver;
  RelaxOptions relax;
  int jobs = 1;
};

// ---------------------------------------------------------------------------
// grid-s3

struct GridPoint {
  double v1 = 0.0, v2 = 0.0;
  Verdict r1 = Verdict::Undetermined;
  Verdict r2 = Verdict::Undetermined;
};

/// "both-infeasible", "r1-feasible-r2-infeasible", "both-feasible", or
/// "undetermined" when either level is inconclusive.
std::string grid_class(const GridPoint& p);
/// "feasible", "infeasible" or "undetermined".
std::string grid_status(Verdict v);

/// n = 3, Λ = {−1, 0, 1}, ℓ zero-RHS Gaussian constraints.
IEPInstance grid_s3_base(int ell, std::uint64_t seed);
/// resolution × resolution points over [−1, 1]², row-major in v1. A point
/// is feasible at a level when the projection of that relaxation onto
/// (X[0][0], X[1][1]) contains (v1, v2).
std::vector<GridPoint> run_grid_s3(int ell, std::uint64_t seed, int resolution, const ExperimentOptions& opts = {});
std::string grid_to_csv(const std::vector<GridPoint>& grid);

// ---------------------------------------------------------------------------
// Certify + round pipelines

struct LevelRun {
  Level level = Level::R1;
  std::optional<LevelReport> feasibility;
  std::optional<RoundingReport> rounding;
  std::string note;
};

struct PipelineResult {
  std::string id;
  IEPInstance inst;
  Cert1Result cert1;
  std::vector<LevelRun> levels;
};

/// Alt-1, then for each level a feasibility solve and (unless certified
/// infeasible or over the moment cap) `trials` rounding attempts.
PipelineResult run_pipeline(const std::string& id, const IEPInstance& inst, const std::vector<Level>& levels,
                            int trials, std::uint64_t base_seed, const ExperimentOptions& opts = {});

/// "sturm5-int", "sturm5-squares", "toeplitz5" or "toeplitz8".
IEPInstance pipeline_instance(const std::string& id);

std::string pipeline_summary_json(const PipelineResult& r);

// ---------------------------------------------------------------------------
// octahedral

struct SubgraphRow {
  std::uint64_t seed = 0;
  int edges = 0;
  Cert1Result cert1;                  ///< −1 ∈ I1 + Σ
  std::optional<LevelReport> r1;      ///< R1 feasibility solve
  std::optional<LevelReport> r2plus;  ///< only when R1 does not certify
  std::string note;

  /// "r1", "r2plus" or "none".
  std::string certified_at() const;
};

std::vector<SubgraphRow> run_octahedral(int n, double p, int seeds, std::uint64_t base_seed,
                                        bool try_r2plus, const ExperimentOptions& opts = {});
std::string octahedral_to_csv(const std::vector<SubgraphRow>& rows);

// ---------------------------------------------------------------------------
// prop2

struct Prop2Row {
  int ell = 0;
  int reps = 0;
  int unique = 0;
  int planted_recovered = 0;  ///< unique and within 1e-4 of the planted X
};

/// Planted X* = diag(n, n−1, ..., 1). For each ℓ and rep, two random
/// functionals are maximized over R1; the point counts as unique when the
/// two decoded X agree to 1e-4 in Frobenius norm.
std::vector<Prop2Row> run_prop2(int n, int ell_lo, int ell_hi, int reps, std::uint64_t base_seed,
                                const ExperimentOptions& opts = {});
std::string prop2_to_csv(const std::vector<Prop2Row>& rows);

}  // namespace iep
