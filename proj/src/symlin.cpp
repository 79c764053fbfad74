#include "iep/symlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iep {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void require_square(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error("matrix is not square");
}

}  // namespace

SymMatrix::SymMatrix(int n) {
  if (n < 0) throw Error("negative matrix dimension");
  m_ = Eigen::MatrixXd::Zero(n, n);
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m) {
  require_square(m);
  for (Eigen::Index s = 0; s < m.rows(); ++s)
    for (Eigen::Index t = s + 1; t < m.cols(); ++t)
      if (m(s, t) != m(t, s))
        throw Error("matrix is not symmetric at (" + std::to_string(s) + "," +
                    std::to_string(t) + ")");
  SymMatrix out;
  out.m_ = m;
  return out;
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& m) {
  require_square(m);
  SymMatrix out;
  out.m_ = 0.5 * (m + m.transpose());
  // (a+b)/2 and (b+a)/2 round identically, but keep the invariant explicit.
  out.m_.triangularView<Eigen::StrictlyLower>() =
      out.m_.transpose().triangularView<Eigen::StrictlyLower>();
  return out;
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix out(n);
  out.m_.diagonal().setOnes();
  return out;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix out(static_cast<int>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i) out.m_(i, i) = diag[i];
  return out;
}

void SymMatrix::add(int s, int t, double v) {
  m_(s, t) += v;
  if (s != t) m_(t, s) = m_(s, t);
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.n() != n()) throw Error("dimension mismatch in SymMatrix +");
  m_ += o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.n() != n()) throw Error("dimension mismatch in SymMatrix -");
  m_ -= o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double a) {
  m_ *= a;
  return *this;
}

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.n() != b.n()) throw Error("dimension mismatch in inner product");
  return a.dense().cwiseProduct(b.dense()).sum();
}

int svec_order(int d) {
  int n = static_cast<int>(std::lround((std::sqrt(8.0 * d + 1.0) - 1.0) / 2.0));
  if (svec_dim(n) != d) throw Error("svec length " + std::to_string(d) + " is not triangular");
  return n;
}

int svec_index(int s, int t, int n) {
  if (s > t) std::swap(s, t);
  if (s < 0 || t >= n) throw Error("svec index out of range");
  return s * n - s * (s - 1) / 2 + (t - s);
}

void svec_into(const Eigen::MatrixXd& m, std::span<double> out) {
  const int n = static_cast<int>(m.rows());
  int k = 0;
  for (int s = 0; s < n; ++s) {
    out[k++] = m(s, s);
    for (int t = s + 1; t < n; ++t) out[k++] = kSqrt2 * m(s, t);
  }
}

Eigen::VectorXd svec(const SymMatrix& m) {
  Eigen::VectorXd v(svec_dim(m.n()));
  svec_into(m.dense(), {v.data(), static_cast<std::size_t>(v.size())});
  return v;
}

void smat_into(std::span<const double> v, Eigen::MatrixXd& out) {
  const int n = svec_order(static_cast<int>(v.size()));
  out.resize(n, n);
  int k = 0;
  for (int s = 0; s < n; ++s) {
    out(s, s) = v[k++];
    for (int t = s + 1; t < n; ++t) {
      const double x = v[k++] / kSqrt2;
      out(s, t) = x;
      out(t, s) = x;
    }
  }
}

SymMatrix smat(std::span<const double> v) {
  Eigen::MatrixXd m;
  smat_into(v, m);
  return SymMatrix::from_dense(m);
}

SymMatrix smat(const Eigen::VectorXd& v) {
  return smat(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

SymMatrix basis_f(int s, int t, int n) {
  if (s < 0 || t < 0 || s >= n || t >= n) throw Error("basis_f index out of range");
  SymMatrix f(n);
  if (s == t)
    f.set(s, s, 1.0);
  else
    f.set(s, t, 0.5);
  return f;
}

Eigen::VectorXd svec_basis_f(int s, int t, int n) {
  if (s < 0 || t < 0 || s >= n || t >= n) throw Error("basis_f index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(svec_dim(n));
  v[svec_index(s, t, n)] = (s == t) ? 1.0 : 0.5 * kSqrt2;
  return v;
}

namespace {

// Cyclic Jacobi with Rutishauser's threshold strategy. `a` is overwritten.
EigenDecomposition jacobi(Eigen::MatrixXd a, int max_sweeps) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());
  int sweep = 0;
  for (;; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) break;
    if (sweep >= max_sweeps)
      throw NonConvergence("Jacobi eigensolver did not converge in " +
                           std::to_string(max_sweeps) + " sweeps");
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  EigenDecomposition out;
  out.values = a.diagonal();
  out.vectors = std::move(v);
  return out;
}

void sort_ascending(EigenDecomposition& e) {
  const Eigen::Index n = e.values.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return e.values[i] < e.values[j]; });
  Eigen::VectorXd vals(n);
  Eigen::MatrixXd vecs(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    vals[k] = e.values[order[k]];
    vecs.col(k) = e.vectors.col(order[k]);
  }
  e.values = std::move(vals);
  e.vectors = std::move(vecs);
}

}  // namespace

EigenDecomposition eigh(const Eigen::MatrixXd& m, const EigenOptions& opts) {
  require_square(m);
  EigenDecomposition out;
  if (m.rows() == 0) return out;
  if (opts.method == EigenMethod::Jacobi) {
    out = jacobi(m, opts.max_sweeps);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
      throw NonConvergence("tridiagonal QL eigensolver did not converge");
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }
  sort_ascending(out);
  return out;
}

EigenDecomposition eigh(const SymMatrix& m, const EigenOptions& opts) {
  return eigh(m.dense(), opts);
}

Eigen::VectorXd eigenvalues(const SymMatrix& m, const EigenOptions& opts) {
  return eigh(m, opts).values;
}

SymMatrix project_psd(const SymMatrix& m, const EigenOptions& opts) {
  const EigenDecomposition e = eigh(m, opts);
  const Eigen::VectorXd clamped = e.values.cwiseMax(0.0);
  return SymMatrix::symmetrized(e.vectors * clamped.asDiagonal() * e.vectors.transpose());
}

void project_psd_svec(std::span<double> v, Eigen::MatrixXd& scratch, EigenMethod method) {
  smat_into(v, scratch);
  const Eigen::Index n = scratch.rows();
  if (n == 1) {
    v[0] = std::max(v[0], 0.0);
    return;
  }
  EigenDecomposition e;
  if (method == EigenMethod::Tridiagonal) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scratch);
    if (solver.info() != Eigen::Success)
      throw NonConvergence("tridiagonal QL eigensolver did not converge");
    e.values = solver.eigenvalues();
    e.vectors = solver.eigenvectors();
  } else {
    e = eigh(scratch, {method, 100});
  }
  // Reconstruct from whichever side of the spectrum is smaller.
  Eigen::Index npos = 0;
  for (Eigen::Index k = 0; k < n; ++k) npos += e.values[k] > 0.0;
  if (npos == 0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  if (npos <= n - npos) {
    scratch.setZero();
    for (Eigen::Index k = 0; k < n; ++k)
      if (e.values[k] > 0.0)
        scratch.selfadjointView<Eigen::Lower>().rankUpdate(e.vectors.col(k), e.values[k]);
  } else {
    // M₊ = M − M₋
    for (Eigen::Index k = 0; k < n; ++k)
      if (e.values[k] < 0.0)
        scratch.selfadjointView<Eigen::Lower>().rankUpdate(e.vectors.col(k), -e.values[k]);
  }
  scratch.triangularView<Eigen::StrictlyUpper>() = scratch.transpose();
  svec_into(scratch, v);
}

bool majorizes(std::span<const double> a, std::span<const double> b, double tol) {
  if (a.size() != b.size()) throw Error("majorizes: length mismatch");
  double sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    if (sb > sa + tol) return false;
  }
  return std::abs(sa - sb) <= tol;
}

}  // namespace iep
