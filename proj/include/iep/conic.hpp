#pragma once

// Standard-form conic programs
//
//     minimize cᵀx  subject to  A x = b,  x ∈ K
//
// where K is a product of PSD blocks (svec coordinates) and free blocks, and
// an operator-splitting solver on the homogeneous self-dual embedding that
// returns either a primal-dual solution or a Farkas certificate
// (Aᵀy ∈ K*, bᵀy = −1).

#include "iep/symlin.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace iep {

enum class ConeKind { PSD, Free };

struct ConeBlock {
  ConeKind kind = ConeKind::Free;
  int size = 0;  ///< matrix order k for PSD(k), length m for FREE(m)

  int dim() const { return kind == ConeKind::PSD ? svec_dim(size) : size; }
};

struct ConeSpec {
  std::vector<ConeBlock> blocks;

  int dim() const;
  /// Starting offset of each block in the stacked variable vector.
  std::vector<int> offsets() const;
  void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ConicProgram {
  ConeSpec cone;
  SparseMatrix A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<std::string> row_labels;  ///< optional, for diagnostics

  int num_vars() const { return static_cast<int>(A.cols()); }
  int num_rows() const { return static_cast<int>(A.rows()); }
  void validate() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, NumericalTrouble };

std::string to_string(SolveStatus s);

struct SolverOptions {
  double eps = 1e-7;
  int max_iter = 200000;
  std::uint64_t seed = 0;
  double alpha = 1.6;          ///< over-relaxation
  int check_every = 20;
  bool equilibrate = true;
  double time_limit_s = 0.0;   ///< 0 disables
  int verbose = 0;
};

struct SolveResiduals {
  double primal = 0.0;  ///< ||Ax − b||
  double dual = 0.0;    ///< ||Aᵀy + s − c||
  double cone = 0.0;    ///< dist(x, K)
  double gap = 0.0;     ///< |cᵀx − bᵀy|
};

struct ConicSolution {
  SolveStatus status = SolveStatus::MaxIter;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  double objective = 0.0;
  SolveResiduals residuals;
  std::optional<Eigen::VectorXd> certificate;  ///< Farkas y with bᵀy = −1
  int iterations = 0;
  double solve_time_s = 0.0;
  std::string message;
};

/// Euclidean distance from v to K (K* = K for PSD blocks; free blocks
/// contribute nothing).
double cone_distance(const ConeSpec& cone, const Eigen::VectorXd& v);
/// Distance to the dual cone: PSD blocks as above, free blocks must be zero.
double dual_cone_distance(const ConeSpec& cone, const Eigen::VectorXd& v);
/// Projection onto K.
Eigen::VectorXd project_cone(const ConeSpec& cone, const Eigen::VectorXd& v);

/// Reusable solver for a fixed (A, K). Preprocessing and the KKT
/// factorization are computed once; solve() may then be called with
/// different b and c, which is how repeated rounding trials share work.
class ConicSolver {
 public:
  ConicSolver(const ConeSpec& cone, const SparseMatrix& A, SolverOptions opts = {});
  ~ConicSolver();
  ConicSolver(ConicSolver&&) noexcept;
  ConicSolver& operator=(ConicSolver&&) noexcept;

  ConicSolution solve(const Eigen::VectorXd& b, const Eigen::VectorXd& c) const;

  const SolverOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ConicSolution solve(const ConicProgram& p, const SolverOptions& opts = {});

struct FarkasReport {
  bool valid = false;
  double cone_distance = 0.0;  ///< dist(Aᵀy, K*) after normalization
  double btY = 0.0;            ///< bᵀy after normalization (−1 when normalizable)
  double scale = 0.0;          ///< factor applied to y to reach bᵀy = −1
  std::string reason;
};

/// Recomputes Aᵀy and bᵀy from scratch. Accepts when bᵀy < 0 and, after
/// rescaling to bᵀy = −1, dist(Aᵀy, K*) ≤ tol. Every relaxation here has a
/// bounded feasible set, so this proves infeasibility whenever tol·max||x|| < 1.
FarkasReport verify_farkas(const ConicProgram& p, const Eigen::VectorXd& y, double tol);

/// Debug dump of (A, b, c, cone) as JSON for cross-checking elsewhere.
std::string program_to_json(const ConicProgram& p);

}  // namespace iep
