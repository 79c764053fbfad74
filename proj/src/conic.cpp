#include "iep/conic.hpp"

#include <Eigen/SparseCholesky>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

namespace iep {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::PrimalInfeasible: return "PRIMAL_INFEASIBLE";
    case SolveStatus::DualInfeasible: return "DUAL_INFEASIBLE";
    case SolveStatus::MaxIter: return "MAX_ITER";
    case SolveStatus::NumericalTrouble: return "NUMERICAL_TROUBLE";
  }
  return "UNKNOWN";
}

int ConeSpec::dim() const {
  int d = 0;
  for (const auto& b : blocks) d += b.dim();
  return d;
}

std::vector<int> ConeSpec::offsets() const {
  std::vector<int> out;
  out.reserve(blocks.size());
  int off = 0;
  for (const auto& b : blocks) {
    out.push_back(off);
    off += b.dim();
  }
  return out;
}

void ConeSpec::validate() const {
  for (const auto& b : blocks)
    if (b.size <= 0) throw Error("cone block sizes must be positive");
}

void ConicProgram::validate() const {
  cone.validate();
  if (A.cols() != cone.dim())
    throw Error("conic program: A has " + std::to_string(A.cols()) + " columns, cone dimension is " +
                std::to_string(cone.dim()));
  if (b.size() != A.rows()) throw Error("conic program: b length does not match rows of A");
  if (c.size() != A.cols()) throw Error("conic program: c length does not match columns of A");
  if (!row_labels.empty() && static_cast<Eigen::Index>(row_labels.size()) != A.rows())
    throw Error("conic program: row label count does not match rows of A");
}

namespace {

using Vec = Eigen::VectorXd;

void project_in_place(const ConeSpec& cone, double* v, Eigen::MatrixXd& scratch) {
  int off = 0;
  for (const auto& blk : cone.blocks) {
    const int d = blk.dim();
    if (blk.kind == ConeKind::PSD)
      project_psd_svec({v + off, static_cast<std::size_t>(d)}, scratch, EigenMethod::Tridiagonal);
    off += d;
  }
}

}  // namespace

Vec project_cone(const ConeSpec& cone, const Vec& v) {
  if (v.size() != cone.dim()) throw Error("project_cone: dimension mismatch");
  Vec out = v;
  Eigen::MatrixXd scratch;
  project_in_place(cone, out.data(), scratch);
  return out;
}

double cone_distance(const ConeSpec& cone, const Vec& v) {
  return (v - project_cone(cone, v)).norm();
}

double dual_cone_distance(const ConeSpec& cone, const Vec& v) {
  if (v.size() != cone.dim()) throw Error("dual_cone_distance: dimension mismatch");
  Vec proj = v;
  Eigen::MatrixXd scratch;
  int off = 0;
  for (const auto& blk : cone.blocks) {
    const int d = blk.dim();
    if (blk.kind == ConeKind::PSD)
      project_psd_svec({proj.data() + off, static_cast<std::size_t>(d)}, scratch,
                       EigenMethod::Tridiagonal);
    else
      proj.segment(off, d).setZero();
    off += d;
  }
  return (v - proj).norm();
}

// ---------------------------------------------------------------------------

struct ConicSolver::Impl {
  SolverOptions opts;
  ConeSpec cone;
  SparseMatrix A_full;  // as given
  int n = 0;            // variables
  int m_full = 0;

  // Row preprocessing: kept rows of A_full, and for each dropped row either
  // -1 (all-zero row) or the kept row it duplicates.
  std::vector<int> kept;
  std::vector<int> dropped_row;
  std::vector<int> dropped_link;

  // Equilibration: Â = D A E.
  Vec D, E;
  SparseMatrix Ahat;
  SparseMatrix AhatT;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> kkt;
  bool kkt_ok = false;

  int m() const { return static_cast<int>(kept.size()); }

  void preprocess();
  void equilibrate();
  void factor();
  Vec solve_m(const Vec& rx, const Vec& ry, Vec& out_y) const;
  std::optional<ConicSolution> short_circuit(const Vec& b) const;
  ConicSolution run(const Vec& b, const Vec& c) const;
};

namespace {

struct RowKey {
  std::vector<std::pair<int, double>> entries;
  bool operator<(const RowKey& o) const { return entries < o.entries; }
};

}  // namespace

void ConicSolver::Impl::preprocess() {
  std::map<RowKey, int> seen;
  for (int r = 0; r < m_full; ++r) {
    RowKey key;
    for (SparseMatrix::InnerIterator it(A_full, r); it; ++it)
      if (it.value() != 0.0) key.entries.emplace_back(static_cast<int>(it.col()), it.value());
    if (key.entries.empty()) {
      dropped_row.push_back(r);
      dropped_link.push_back(-1);
      continue;
    }
    auto [pos, inserted] = seen.emplace(std::move(key), r);
    if (inserted) {
      kept.push_back(r);
    } else {
      dropped_row.push_back(r);
      dropped_link.push_back(pos->second);
    }
  }
}

void ConicSolver::Impl::equilibrate() {
  const int mr = m();
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < mr; ++i)
    for (SparseMatrix::InnerIterator it(A_full, kept[i]); it; ++it)
      trips.emplace_back(i, static_cast<int>(it.col()), it.value());
  Ahat.resize(mr, n);
  Ahat.setFromTriplets(trips.begin(), trips.end());
  Ahat.makeCompressed();
  D = Vec::Ones(mr);
  E = Vec::Ones(n);
  if (opts.equilibrate && mr > 0) {
    const auto offsets = cone.offsets();
    constexpr double lo = 1e-4, hi = 1e4;
    for (int pass = 0; pass < 25; ++pass) {
      Vec rown = Vec::Zero(mr), coln = Vec::Zero(n);
      for (int i = 0; i < mr; ++i)
        for (SparseMatrix::InnerIterator it(Ahat, i); it; ++it) {
          const double a = std::abs(it.value());
          rown[i] = std::max(rown[i], a);
          coln[it.col()] = std::max(coln[it.col()], a);
        }
      // PSD blocks take one scale for the whole block so the cone is preserved.
      for (std::size_t bi = 0; bi < cone.blocks.size(); ++bi) {
        if (cone.blocks[bi].kind != ConeKind::PSD) continue;
        const int off = offsets[bi], d = cone.blocks[bi].dim();
        const double mx = coln.segment(off, d).maxCoeff();
        coln.segment(off, d).setConstant(mx);
      }
      Vec dr(mr), ec(n);
      for (int i = 0; i < mr; ++i) dr[i] = rown[i] > 0 ? 1.0 / std::sqrt(rown[i]) : 1.0;
      for (int j = 0; j < n; ++j) ec[j] = coln[j] > 0 ? 1.0 / std::sqrt(coln[j]) : 1.0;
      for (int i = 0; i < mr; ++i) D[i] = std::clamp(D[i] * dr[i], lo, hi);
      for (int j = 0; j < n; ++j) E[j] = std::clamp(E[j] * ec[j], lo, hi);
      Ahat.setFromTriplets(trips.begin(), trips.end());
      for (int i = 0; i < mr; ++i)
        for (SparseMatrix::InnerIterator it(Ahat, i); it; ++it)
          it.valueRef() *= D[i] * E[it.col()];
      if ((rown.array() - 1.0).abs().maxCoeff() < 0.1 && (coln.array() - 1.0).abs().maxCoeff() < 0.1)
        break;
    }
  }
  AhatT = Ahat.transpose();
}

void ConicSolver::Impl::factor() {
  const int mr = m();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(n + mr + 2 * Ahat.nonZeros());
  for (int j = 0; j < n; ++j) trips.emplace_back(j, j, 1.0);
  for (int i = 0; i < mr; ++i) {
    trips.emplace_back(n + i, n + i, -1.0);
    for (SparseMatrix::InnerIterator it(Ahat, i); it; ++it) {
      trips.emplace_back(n + i, static_cast<int>(it.col()), it.value());
      trips.emplace_back(static_cast<int>(it.col()), n + i, it.value());
    }
  }
  Eigen::SparseMatrix<double> K(n + mr, n + mr);
  K.setFromTriplets(trips.begin(), trips.end());
  kkt.compute(K);
  kkt_ok = kkt.info() == Eigen::Success;
}

// Solves [[I, −Âᵀ], [Â, I]] (x, y) = (rx, ry); returns x, writes y.
Vec ConicSolver::Impl::solve_m(const Vec& rx, const Vec& ry, Vec& out_y) const {
  const int mr = m();
  Vec rhs(n + mr);
  rhs.head(n) = rx;
  rhs.tail(mr) = ry;
  const Vec sol = kkt.solve(rhs);
  out_y = -sol.tail(mr);
  return sol.head(n);
}

std::optional<ConicSolution> ConicSolver::Impl::short_circuit(const Vec& b) const {
  for (std::size_t k = 0; k < dropped_row.size(); ++k) {
    const int r = dropped_row[k];
    const int link = dropped_link[k];
    const double rhs_gap = link < 0 ? b[r] : b[r] - b[link];
    if (rhs_gap == 0.0) continue;
    // Aᵀy = 0 and bᵀy = −1 from a zero row or two identical rows.
    Vec y = Vec::Zero(m_full);
    y[r] = -1.0 / rhs_gap;
    if (link >= 0) y[link] = 1.0 / rhs_gap;
    ConicSolution sol;
    sol.status = SolveStatus::PrimalInfeasible;
    sol.x = Vec::Zero(n);
    sol.y = Vec::Zero(m_full);
    sol.s = Vec::Zero(n);
    sol.certificate = std::move(y);
    sol.message = link < 0 ? "zero constraint row with nonzero right-hand side"
                           : "identical constraint rows with different right-hand sides";
    return sol;
  }
  return std::nullopt;
}

ConicSolution ConicSolver::Impl::run(const Vec& b, const Vec& c) const {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  if (b.size() != m_full) throw Error("solve: b has wrong length");
  if (c.size() != n) throw Error("solve: c has wrong length");

  if (auto sc = short_circuit(b)) return *sc;

  ConicSolution sol;
  sol.x = Vec::Zero(n);
  sol.y = Vec::Zero(m_full);
  sol.s = Vec::Zero(n);
  if (!kkt_ok) {
    sol.status = SolveStatus::NumericalTrouble;
    sol.message = "KKT factorization failed";
    return sol;
  }

  const int mr = m();
  Vec bk(mr);
  for (int i = 0; i < mr; ++i) bk[i] = b[kept[i]];
  Vec bhat = D.cwiseProduct(bk);
  Vec chat = E.cwiseProduct(c);
  const double sb = 1.0 / std::max(1.0, bhat.norm());
  const double sc = 1.0 / std::max(1.0, chat.norm());
  bhat *= sb;
  chat *= sc;

  // p = M⁻¹ h with h = (ĉ, −b̂).
  Vec p_y;
  const Vec p_x = solve_m(chat, -bhat, p_y);
  const double hp = chat.dot(p_x) - bhat.dot(p_y);
  const double denom = 1.0 + hp;

  Vec ux = Vec::Zero(n), uy = Vec::Zero(mr), vs = Vec::Zero(n);
  double ut = 1.0, vk = 1.0;
  Vec wx(n), rx, ry, ubx(n), uby(mr);
  Eigen::MatrixXd scratch;

  const double eps = opts.eps;
  const double bnorm = b.norm(), cnorm = c.norm();
  const double alpha = opts.alpha;

  auto unscale = [&](double tau, Vec& x, Vec& yfull, Vec& s) {
    x = E.cwiseProduct(ux) / (tau * sb);
    Vec y = D.cwiseProduct(uy) / (tau * sc);
    yfull = Vec::Zero(m_full);
    for (int i = 0; i < mr; ++i) yfull[kept[i]] = y[i];
    s = vs.cwiseQuotient(E) / (tau * sc);
  };

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // ũ = (I + Q)⁻¹ (u + v)
    wx = ux + vs;
    Vec r_y;
    const Vec r_x = solve_m(wx, uy, r_y);
    const double wt = ut + vk;
    const double tt = (wt + chat.dot(r_x) - bhat.dot(r_y)) / denom;
    const Vec tx = r_x - tt * p_x;
    const Vec ty = r_y - tt * p_y;

    // Over-relaxation, projection, dual update.
    ubx = alpha * tx + (1.0 - alpha) * ux;
    uby = alpha * ty + (1.0 - alpha) * uy;
    const double ubt = alpha * tt + (1.0 - alpha) * ut;

    Vec nx = ubx - vs;
    project_in_place(cone, nx.data(), scratch);
    const double nt = std::max(ubt - vk, 0.0);

    vs += nx - ubx;
    vk += nt - ubt;
    ux = std::move(nx);
    uy = uby;
    ut = nt;

    if (!std::isfinite(ut) || !std::isfinite(vk)) {
      sol.status = SolveStatus::NumericalTrouble;
      sol.message = "non-finite iterate";
      break;
    }

    if ((it + 1) % opts.check_every != 0) continue;

    // Optimality test in original coordinates.
    if (ut > 1e-12) {
      Vec x, y, s;
      unscale(ut, x, y, s);
      const double pres = (A_full * x - b).norm();
      const double dres = (A_full.transpose() * y + s - c).norm();
      const double ctx = c.dot(x), bty = b.dot(y);
      const double gap = std::abs(ctx - bty);
      if (opts.verbose > 1)
        std::fprintf(stderr, "it %6d pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e\n", it + 1,
                     pres, dres, gap, ut, vk);
      if (pres <= eps * (1.0 + bnorm) && dres <= eps * (1.0 + cnorm) &&
          gap <= eps * (1.0 + std::abs(ctx))) {
        sol.status = SolveStatus::Optimal;
        sol.x = std::move(x);
        sol.y = std::move(y);
        sol.s = std::move(s);
        sol.objective = ctx;
        sol.residuals = {pres, dres, cone_distance(cone, sol.x), gap};
        ++it;
        break;
      }
    }

    // Primal infeasibility: −u_y, mapped back, is a Farkas candidate.
    {
      Vec y = Vec::Zero(m_full);
      for (int i = 0; i < mr; ++i) y[kept[i]] = -D[i] * uy[i];
      const double bty = b.dot(y);
      if (bty < 0.0) {
        y /= -bty;
        const Vec g = A_full.transpose() * y;
        const double dist = dual_cone_distance(cone, g);
        if (dist <= eps) {
          sol.status = SolveStatus::PrimalInfeasible;
          sol.certificate = std::move(y);
          sol.residuals.cone = dist;
          ++it;
          break;
        }
      }
    }

    // Dual infeasibility: improving ray of the primal.
    {
      const Vec x = E.cwiseProduct(ux);
      const double ctx = c.dot(x);
      if (ctx < 0.0) {
        const Vec xr = x / -ctx;
        if ((A_full * xr).norm() <= eps * std::max(1.0, xr.norm())) {
          sol.status = SolveStatus::DualInfeasible;
          sol.x = xr;
          ++it;
          break;
        }
      }
    }

    if (opts.time_limit_s > 0.0 &&
        std::chrono::duration<double>(clock::now() - t0).count() > opts.time_limit_s) {
      ++it;
      break;
    }
  }

  if (sol.status == SolveStatus::MaxIter && ut > 1e-12) {
    Vec x, y, s;
    unscale(ut, x, y, s);
    sol.residuals.primal = (A_full * x - b).norm();
    sol.residuals.dual = (A_full.transpose() * y + s - c).norm();
    sol.objective = c.dot(x);
    sol.residuals.gap = std::abs(sol.objective - b.dot(y));
    sol.x = std::move(x);
    sol.y = std::move(y);
    sol.s = std::move(s);
  }
  sol.iterations = it;
  sol.solve_time_s = std::chrono::duration<double>(clock::now() - t0).count();
  if (opts.verbose > 0)
    std::fprintf(stderr, "conic: %s after %d iterations (%.2fs)\n", to_string(sol.status).c_str(),
                 sol.iterations, sol.solve_time_s);
  return sol;
}

ConicSolver::ConicSolver(const ConeSpec& cone, const SparseMatrix& A, SolverOptions opts)
    : impl_(std::make_unique<Impl>()) {
  cone.validate();
  if (A.cols() != cone.dim()) throw Error("ConicSolver: A does not match the cone dimension");
  impl_->opts = opts;
  impl_->cone = cone;
  impl_->A_full = A;
  impl_->A_full.makeCompressed();
  impl_->n = static_cast<int>(A.cols());
  impl_->m_full = static_cast<int>(A.rows());
  impl_->preprocess();
  impl_->equilibrate();
  impl_->factor();
}

ConicSolver::~ConicSolver() = default;
ConicSolver::ConicSolver(ConicSolver&&) noexcept = default;
ConicSolver& ConicSolver::operator=(ConicSolver&&) noexcept = default;

ConicSolution ConicSolver::solve(const Vec& b, const Vec& c) const { return impl_->run(b, c); }

const SolverOptions& ConicSolver::options() const { return impl_->opts; }

ConicSolution solve(const ConicProgram& p, const SolverOptions& opts) {
  p.validate();
  ConicSolver solver(p.cone, p.A, opts);
  return solver.solve(p.b, p.c);
}

FarkasReport verify_farkas(const ConicProgram& p, const Vec& y, double tol) {
  if (y.size() != p.A.rows()) throw Error("verify_farkas: y has wrong length");
  if (p.A.cols() != p.cone.dim()) throw Error("verify_farkas: program is malformed");
  FarkasReport rep;
  double bty = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) bty += p.b[i] * y[i];
  if (!(bty < 0.0)) {
    rep.btY = bty;
    rep.reason = "bᵀy is not negative";
    return rep;
  }
  rep.scale = -1.0 / bty;
  const Vec yn = rep.scale * y;
  Vec g = Vec::Zero(p.A.cols());
  for (int r = 0; r < p.A.rows(); ++r)
    for (SparseMatrix::InnerIterator it(p.A, r); it; ++it) g[it.col()] += it.value() * yn[r];
  double btn = 0.0;
  for (Eigen::Index i = 0; i < yn.size(); ++i) btn += p.b[i] * yn[i];
  rep.btY = btn;
  rep.cone_distance = dual_cone_distance(p.cone, g);
  const bool cone_ok = rep.cone_distance <= tol;
  const bool sign_ok = btn <= -1.0 + tol;
  rep.valid = cone_ok && sign_ok;
  if (!cone_ok) rep.reason = "Aᵀy is not in the dual cone";
  return rep;
}

std::string program_to_json(const ConicProgram& p) {
  using nlohmann::json;
  json doc;
  json cone = json::array();
  for (const auto& b : p.cone.blocks)
    cone.push_back({{"kind", b.kind == ConeKind::PSD ? "psd" : "free"}, {"size", b.size}});
  doc["cone"] = std::move(cone);
  doc["rows"] = p.A.rows();
  doc["cols"] = p.A.cols();
  json entries = json::array();
  for (int r = 0; r < p.A.rows(); ++r)
    for (SparseMatrix::InnerIterator it(p.A, r); it; ++it)
      entries.push_back({r, it.col(), it.value()});
  doc["A"] = std::move(entries);
  doc["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  doc["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
  if (!p.row_labels.empty()) doc["row_labels"] = p.row_labels;
  doc["svec"] = "upper triangle row by row, off-diagonals scaled by sqrt(2)";
  return doc.dump();
}

}  // namespace iep
