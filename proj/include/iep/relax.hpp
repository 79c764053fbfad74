#pragma once

// Compilation of an IEP instance into conic programs:
//
//   R1      q PSD(n) blocks Z_i with Σ Z_i = I, tr Z_i = m_i and the affine
//           constraints on X = Σ λ_i Z_i.
//   Alt-1   the strong alternative of R1: −1 ∈ I1 + Σ, with variables
//           (A, d, ξ, B_ii).
//   R2/R2+  R1 plus a PSD(q·n(n+1)/2) block 𝔚 = [U_ij] holding the linear
//           maps W_ij in svec coordinates, tied to the Z_i by four linear
//           families (and, for R2+, the orthogonality family Z_i Z_j = 0).

#include "iep/conic.hpp"
#include "iep/instance.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iep {

enum class ProgramKind { R1, R2, R2Plus, Alt1 };
enum class Level { R1, R2, R2Plus };

std::string to_string(ProgramKind k);
std::string to_string(Level l);
Level parse_level(const std::string& s);
ProgramKind program_kind(Level l);

struct LayoutEntry {
  std::string name;  ///< "Z1", "W", "A", "d", "xi", "B1", ...
  int block = 0;     ///< index into ConeSpec::blocks
  int offset = 0;    ///< start in the stacked variable vector
  int length = 0;
};

/// Where each named variable lives in a ConicProgram's vector.
struct VariableLayout {
  ProgramKind kind = ProgramKind::R1;
  int n = 0, q = 0, ell = 0;
  std::vector<LayoutEntry> entries;
  int total = 0;

  const LayoutEntry& find(const std::string& name) const;
  bool has(const std::string& name) const;
  int z_offset(int i) const;
  int w_offset() const;
  int w_order() const { return q * svec_dim(n); }
};

/// The stacked svec-coordinate operator 𝔚 = [U_ij], U_ij of size d×d with
/// svec(W_ij(X)) = U_ij svec(X).
struct MomentBlocks {
  int q = 0;
  int d = 0;
  Eigen::MatrixXd W;

  Eigen::MatrixXd U(int i, int j) const { return W.block(i * d, j * d, d, d); }

  /// Rank-one lift U_ij = svec(Z_i) svec(Z_j)ᵀ of a candidate.
  static MomentBlocks lift(const CandidateSolution& cand);
};

/// Witness of −1 ∈ I1 + Σ: the Alt-1 variables. The ideal coefficients are
/// h_1 = −A, h_2 = −d, h_3 = −B_ii, h_4 = −ξ.
struct Cert1 {
  SymMatrix A;
  Eigen::VectorXd d;
  Eigen::VectorXd xi;
  std::vector<SymMatrix> B;
};

struct BuiltProgram {
  ConicProgram program;
  VariableLayout layout;
};

struct RelaxOptions {
  int moment_cap = 400;  ///< refuse R2 when q·n(n+1)/2 exceeds this
};

BuiltProgram build_r1(const IEPInstance& inst);
BuiltProgram build_alt1(const IEPInstance& inst);
BuiltProgram build_r2(const IEPInstance& inst, bool plus, const RelaxOptions& opts = {});
BuiltProgram build_level(const IEPInstance& inst, Level level, const RelaxOptions& opts = {});

/// Appends rows tr(C X) = b on X = Σ λ_i Z_i only. The moment families are
/// left alone, so for R2/R2+ this slices the projection of the relaxation
/// rather than tightening E.
ConicProgram append_x_constraints(ConicProgram p, const VariableLayout& layout, const Spectrum& spectrum,
                                  const std::vector<AffineConstraint>& extra);

/// Sets c so the program minimizes −Σ tr(G_i Z_i). 𝔚 gets no weight.
ConicProgram attach_objective(ConicProgram p, const VariableLayout& layout,
                              const std::vector<SymMatrix>& G);
Eigen::VectorXd objective_vector(const VariableLayout& layout, const std::vector<SymMatrix>& G);

struct Decoded {
  std::optional<CandidateSolution> candidate;
  std::optional<MomentBlocks> moments;
  std::optional<Cert1> cert1;
};

Decoded decode(const VariableLayout& layout, const Eigen::VectorXd& x, const Spectrum& spectrum);

/// Inverse of decode for R1/R2/R2+ layouts.
Eigen::VectorXd encode(const VariableLayout& layout, const CandidateSolution& cand,
                       const std::optional<MomentBlocks>& moments = std::nullopt);
/// Inverse of decode for Alt-1 layouts.
Eigen::VectorXd encode(const VariableLayout& layout, const Cert1& cert);

}  // namespace iep
