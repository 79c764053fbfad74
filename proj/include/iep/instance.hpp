#pragma once

// The affine inverse eigenvalue problem: a target spectrum Λ and an affine
// space E = {X : tr(C_k X) = b_k}. Also holds the projector-tuple candidate
// representation, the exact residual test, and the experiment generators.

#include "iep/symlin.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iep {

struct Eigenpair {
  double value = 0.0;
  int mult = 1;
};

/// Multiset of (eigenvalue, multiplicity) pairs, sorted by ascending value.
class Spectrum {
 public:
  static constexpr double kDefaultMergeTol = 1e-9;

  Spectrum() = default;
  /// Validates: q ≥ 1, multiplicities positive, values separated by more
  /// than merge_tol. Pairs are re-sorted ascending.
  explicit Spectrum(std::vector<Eigenpair> pairs, double merge_tol = kDefaultMergeTol);

  /// Groups a list of eigenvalues. Values within merge_tol of each other are
  /// merged; a gap inside (ambiguity_floor, merge_tol] is an error when
  /// ambiguity_floor > 0.
  static Spectrum from_values(std::vector<double> values, double merge_tol = kDefaultMergeTol,
                              double ambiguity_floor = 0.0);

  int n() const { return n_; }
  int q() const { return static_cast<int>(pairs_.size()); }
  const std::vector<Eigenpair>& pairs() const { return pairs_; }
  double value(int i) const { return pairs_[i].value; }
  int mult(int i) const { return pairs_[i].mult; }

  std::vector<double> expanded_ascending() const;
  std::vector<double> expanded_descending() const;

 private:
  std::vector<Eigenpair> pairs_;
  int n_ = 0;
};

struct AffineConstraint {
  SymMatrix C;
  double b = 0.0;
};

struct IEPInstance {
  int n = 0;
  Spectrum spectrum;
  std::vector<AffineConstraint> constraints;
  std::string label;

  int q() const { return spectrum.q(); }
  int ell() const { return static_cast<int>(constraints.size()); }

  /// Throws Error naming the violated invariant.
  void validate() const;
};

/// A tuple of matrices Z_1..Z_q (ideally orthogonal projectors partitioning
/// the identity) together with X = Σ λ_i Z_i.
struct CandidateSolution {
  std::vector<SymMatrix> Z;
  SymMatrix X;

  static CandidateSolution from_projectors(std::vector<SymMatrix> Z, const Spectrum& spectrum);
};

/// Spectral projectors of X grouped by the target spectrum: the k-th block
/// of eigenvectors (ascending) of size m_i builds Z_i.
CandidateSolution spectral_projectors(const SymMatrix& X, const Spectrum& spectrum);

struct Residuals {
  double r_part = 0.0;   ///< ||Σ Z_i − I||_F
  double r_trace = 0.0;  ///< max_i |tr Z_i − m_i|
  double r_idem = 0.0;   ///< max_i ||Z_i² − Z_i||_F
  double r_aff = 0.0;    ///< max_k |Σ_i λ_i tr(Z_i C_k) − b_k|

  double max() const;
  bool within(double tau) const { return max() <= tau; }
};

inline constexpr double kDefaultMembershipTol = 1e-5;

Residuals residuals(const IEPInstance& inst, const CandidateSolution& cand);

/// Max over k of |tr(C_k X) − b_k|.
double affine_residual(const IEPInstance& inst, const SymMatrix& X);

// ---------------------------------------------------------------------------
// Generators

/// Gaussian affine space. C_k = (G + Gᵀ)/2 with G i.i.d. N(0,1); b_k = 0, or
/// b_k = tr(C_k X*) when a planted matrix is supplied (its spectrum must match
/// within 1e-8).
IEPInstance gen_random(int n, const Spectrum& spectrum, int ell, std::uint64_t seed,
                       const std::optional<SymMatrix>& planted = std::nullopt);

/// Discretized Sturm-Liouville operator (n+1)²/π² J + D with D diagonal and
/// free: every off-diagonal entry is pinned.
IEPInstance gen_sturm_liouville(int n, const std::vector<double>& eigenvalues);

/// Symmetric Toeplitz structure as chained equalities along each band.
IEPInstance gen_toeplitz(int n, const Spectrum& spectrum);

/// Induced-subgraph embedding of graph A' into graph A (both 0/1 adjacency
/// matrices with zero diagonal).
IEPInstance gen_induced_subgraph(const SymMatrix& A, const SymMatrix& Aprime);

/// The Sturm-Liouville off-diagonal scale (n+1)²/π².
double sturm_liouville_scale(int n);

/// Erdős–Rényi graph: each unordered pair joined independently with prob. p.
SymMatrix erdos_renyi(int n, double p, std::uint64_t seed);

/// K_{2,2,2}: six vertices, each adjacent to all but its antipode.
SymMatrix octahedral_graph();

// ---------------------------------------------------------------------------
// JSON serialization (see instance_io.cpp for the schema)

std::string instance_to_json(const IEPInstance& inst, int indent = 2);
IEPInstance instance_from_json(const std::string& text);
IEPInstance load_instance(const std::string& path);
void save_instance(const IEPInstance& inst, const std::string& path);

}  // namespace iep
