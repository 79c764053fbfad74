#pragma once

// Dense symmetric linear algebra: the SymMatrix value type, isometric
// svec/smat coordinates, the f_{s,t} basis, symmetric eigensolvers, PSD
// projection and majorization.
//
// Indices are zero-based throughout.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iep {

/// Base exception for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative eigensolver exceeds its sweep cap.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Dense real symmetric matrix. Storage is full; every mutation writes both
/// triangles, so M(s,t) == M(t,s) holds bitwise.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  /// Takes a dense matrix that must already be exactly symmetric.
  static SymMatrix from_dense(const Eigen::MatrixXd& m);
  /// Symmetrizes (M + Mᵀ)/2 and wraps the result.
  static SymMatrix symmetrized(const Eigen::MatrixXd& m);
  static SymMatrix identity(int n);
  static SymMatrix zero(int n) { return SymMatrix(n); }
  static SymMatrix diagonal(std::span<const double> diag);

  int n() const { return static_cast<int>(m_.rows()); }
  double operator()(int s, int t) const { return m_(s, t); }
  void set(int s, int t, double v) {
    m_(s, t) = v;
    m_(t, s) = v;
  }
  void add(int s, int t, double v);

  const Eigen::MatrixXd& dense() const { return m_; }

  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double a);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double a, SymMatrix m) { return m *= a; }
  friend SymMatrix operator*(SymMatrix m, double a) { return m *= a; }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

/// Frobenius inner product tr(A B).
double inner(const SymMatrix& a, const SymMatrix& b);

/// Length of svec for an n×n matrix: n(n+1)/2.
constexpr int svec_dim(int n) { return n * (n + 1) / 2; }

/// Recovers n from d = n(n+1)/2; throws if d is not triangular.
int svec_order(int d);

/// Position of entry (s,t) in svec coordinates. The upper triangle is
/// enumerated row by row: (0,0),(0,1),...,(0,n-1),(1,1),...
int svec_index(int s, int t, int n);

/// Isometric vectorization: off-diagonal entries carry a factor √2 so
/// <A,B>_F == dot(svec A, svec B).
Eigen::VectorXd svec(const SymMatrix& m);
void svec_into(const Eigen::MatrixXd& m, std::span<double> out);
SymMatrix smat(std::span<const double> v);
SymMatrix smat(const Eigen::VectorXd& v);
void smat_into(std::span<const double> v, Eigen::MatrixXd& out);

/// f_{s,t} = e_s e_sᵀ when s == t, else (e_s e_tᵀ + e_t e_sᵀ)/2.
SymMatrix basis_f(int s, int t, int n);

/// svec(f_{s,t}) without materializing the matrix.
Eigen::VectorXd svec_basis_f(int s, int t, int n);

enum class EigenMethod {
  Jacobi,       ///< cyclic Jacobi rotations (reference solver)
  Tridiagonal,  ///< Householder tridiagonalization + implicit QL (fast path)
};

struct EigenOptions {
  EigenMethod method = EigenMethod::Jacobi;
  int max_sweeps = 100;
};

struct EigenDecomposition {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< column k is the eigenvector for values[k]
};

/// Symmetric eigendecomposition M = Q diag(λ) Qᵀ with λ ascending. Ties keep
/// the order in which the solver produced them. Throws NonConvergence when
/// Jacobi exceeds max_sweeps.
EigenDecomposition eigh(const SymMatrix& m, const EigenOptions& opts = {});
EigenDecomposition eigh(const Eigen::MatrixXd& m, const EigenOptions& opts = {});

Eigen::VectorXd eigenvalues(const SymMatrix& m, const EigenOptions& opts = {});

/// Frobenius-nearest PSD matrix: Q diag(max(λ,0)) Qᵀ.
SymMatrix project_psd(const SymMatrix& m, const EigenOptions& opts = {});

/// In-place projection of a svec-coordinate block onto the PSD cone.
/// `scratch` is resized as needed and reused between calls.
void project_psd_svec(std::span<double> v, Eigen::MatrixXd& scratch,
                      EigenMethod method = EigenMethod::Tridiagonal);

/// True iff b is majorized by a: every prefix sum of b is at most the
/// matching prefix sum of a (plus tol) and the totals agree within tol.
/// Both vectors must be sorted in descending order.
bool majorizes(std::span<const double> a, std::span<const double> b, double tol);

}  // namespace iep
