#include "iep/relax.hpp"

#include <cmath>

namespace iep {

std::string to_string(ProgramKind k) {
  switch (k) {
    case ProgramKind::R1: return "r1";
    case ProgramKind::R2: return "r2";
    case ProgramKind::R2Plus: return "r2plus";
    case ProgramKind::Alt1: return "alt1";
  }
  return "?";
}

std::string to_string(Level l) { return to_string(program_kind(l)); }

Level parse_level(const std::string& s) {
  if (s == "r1" || s == "R1") return Level::R1;
  if (s == "r2" || s == "R2") return Level::R2;
  if (s == "r2plus" || s == "r2+" || s == "R2+" || s == "R2PLUS") return Level::R2Plus;
  throw Error("unknown relaxation level \"" + s + "\" (expected r1, r2 or r2plus)");
}

ProgramKind program_kind(Level l) {
  switch (l) {
    case Level::R1: return ProgramKind::R1;
    case Level::R2: return ProgramKind::R2;
    case Level::R2Plus: return ProgramKind::R2Plus;
  }
  return ProgramKind::R1;
}

const LayoutEntry& VariableLayout::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw Error("layout has no variable named " + name);
}

bool VariableLayout::has(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return true;
  return false;
}

int VariableLayout::z_offset(int i) const { return find("Z" + std::to_string(i + 1)).offset; }
int VariableLayout::w_offset() const { return find("W").offset; }

MomentBlocks MomentBlocks::lift(const CandidateSolution& cand) {
  MomentBlocks mb;
  mb.q = static_cast<int>(cand.Z.size());
  const int n = cand.Z.empty() ? 0 : cand.Z.front().n();
  mb.d = svec_dim(n);
  Eigen::VectorXd z(mb.q * mb.d);
  for (int i = 0; i < mb.q; ++i) z.segment(i * mb.d, mb.d) = svec(cand.Z[i]);
  mb.W = z * z.transpose();
  return mb;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Accumulates sparse rows; Eigen sums duplicate triplets on assembly.
class RowBuilder {
 public:
  explicit RowBuilder(int cols) : cols_(cols) {}

  int new_row(double rhs, std::string label) {
    b_.push_back(rhs);
    labels_.push_back(std::move(label));
    return static_cast<int>(b_.size()) - 1;
  }
  void add(int row, int col, double v) {
    if (v != 0.0) trips_.emplace_back(row, col, v);
  }

  ConicProgram finish(ConeSpec cone) {
    ConicProgram p;
    p.cone = std::move(cone);
    const int rows = static_cast<int>(b_.size());
    p.A.resize(rows, cols_);
    p.A.setFromTriplets(trips_.begin(), trips_.end());
    p.A.prune([](Eigen::Index, Eigen::Index, double v) { return v != 0.0; });
    p.A.makeCompressed();
    p.b = Eigen::Map<const Eigen::VectorXd>(b_.data(), rows);
    p.c = Eigen::VectorXd::Zero(cols_);
    p.row_labels = std::move(labels_);
    p.validate();
    return p;
  }

 private:
  int cols_;
  std::vector<Eigen::Triplet<double>> trips_;
  std::vector<double> b_;
  std::vector<std::string> labels_;
};

std::string pair_label(int s, int t) { return std::to_string(s) + "," + std::to_string(t); }

// Appends the R1 constraint families for the Z blocks.
void add_r1_rows(RowBuilder& rb, const IEPInstance& inst, const VariableLayout& lay) {
  const int n = inst.n, q = inst.q();
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t) {
      const int row = rb.new_row(s == t ? 1.0 : 0.0, "partition(" + pair_label(s, t) + ")");
      const int k = svec_index(s, t, n);
      for (int i = 0; i < q; ++i) rb.add(row, lay.z_offset(i) + k, 1.0);
    }
  for (int i = 0; i < q; ++i) {
    const int row = rb.new_row(inst.spectrum.mult(i), "trace(Z" + std::to_string(i + 1) + ")");
    for (int s = 0; s < n; ++s) rb.add(row, lay.z_offset(i) + svec_index(s, s, n), 1.0);
  }
  for (int k = 0; k < inst.ell(); ++k) {
    const auto& con = inst.constraints[k];
    const int row = rb.new_row(con.b, "affine[" + std::to_string(k) + "]");
    const Eigen::VectorXd sc = svec(con.C);
    for (int i = 0; i < q; ++i)
      for (int a = 0; a < sc.size(); ++a)
        rb.add(row, lay.z_offset(i) + a, inst.spectrum.value(i) * sc[a]);
  }
}

VariableLayout z_layout(const IEPInstance& inst, ProgramKind kind, ConeSpec& cone) {
  VariableLayout lay;
  lay.kind = kind;
  lay.n = inst.n;
  lay.q = inst.q();
  lay.ell = inst.ell();
  int off = 0;
  for (int i = 0; i < lay.q; ++i) {
    cone.blocks.push_back({ConeKind::PSD, inst.n});
    lay.entries.push_back({"Z" + std::to_string(i + 1), static_cast<int>(cone.blocks.size()) - 1,
                           off, svec_dim(inst.n)});
    off += svec_dim(inst.n);
  }
  lay.total = off;
  return lay;
}

// Column of entry (a,b) of the 𝔚 block and the factor turning that svec
// coordinate into the matrix entry.
struct WEntry {
  int col;
  double scale;
};

class WIndexer {
 public:
  WIndexer(int offset, int order) : off_(offset), order_(order) {}
  WEntry operator()(int a, int b) const {
    return {off_ + svec_index(a, b, order_), a == b ? 1.0 : kInvSqrt2};
  }

 private:
  int off_, order_;
};

}  // namespace

BuiltProgram build_r1(const IEPInstance& inst) {
  inst.validate();
  ConeSpec cone;
  VariableLayout lay = z_layout(inst, ProgramKind::R1, cone);
  RowBuilder rb(lay.total);
  add_r1_rows(rb, inst, lay);
  return {rb.finish(std::move(cone)), std::move(lay)};
}

BuiltProgram build_alt1(const IEPInstance& inst) {
  inst.validate();
  const int n = inst.n, q = inst.q(), ell = inst.ell(), d = svec_dim(n);
  ConeSpec cone;
  VariableLayout lay;
  lay.kind = ProgramKind::Alt1;
  lay.n = n;
  lay.q = q;
  lay.ell = ell;
  int off = 0;
  auto push = [&](std::string name, ConeBlock blk) {
    cone.blocks.push_back(blk);
    lay.entries.push_back({std::move(name), static_cast<int>(cone.blocks.size()) - 1, off, blk.dim()});
    off += blk.dim();
  };
  push("A", {ConeKind::Free, d});
  push("d", {ConeKind::Free, q});
  if (ell > 0) push("xi", {ConeKind::Free, ell});
  for (int i = 0; i < q; ++i) push("B" + std::to_string(i + 1), {ConeKind::PSD, n});
  lay.total = off;

  const int a_off = lay.find("A").offset;
  const int d_off = lay.find("d").offset;
  const int xi_off = ell > 0 ? lay.find("xi").offset : -1;
  const Eigen::VectorXd sI = svec(SymMatrix::identity(n));
  std::vector<Eigen::VectorXd> sC;
  for (const auto& c : inst.constraints) sC.push_back(svec(c.C));

  RowBuilder rb(lay.total);
  // −tr(A) − Σ m_i d_i − Σ b_k ξ_k = 1
  const int norm_row = rb.new_row(1.0, "normalization");
  for (int a = 0; a < d; ++a) rb.add(norm_row, a_off + a, -sI[a]);
  for (int i = 0; i < q; ++i) rb.add(norm_row, d_off + i, -inst.spectrum.mult(i));
  for (int k = 0; k < ell; ++k) rb.add(norm_row, xi_off + k, -inst.constraints[k].b);

  // A + d_i I + λ_i Σ ξ_k C_k − B_ii = 0
  for (int i = 0; i < q; ++i) {
    const int b_off = lay.find("B" + std::to_string(i + 1)).offset;
    const double lam = inst.spectrum.value(i);
    for (int a = 0; a < d; ++a) {
      const int row = rb.new_row(0.0, "coupling[" + std::to_string(i + 1) + "][" +
                                          std::to_string(a) + "]");
      rb.add(row, a_off + a, 1.0);
      rb.add(row, d_off + i, sI[a]);
      for (int k = 0; k < ell; ++k) rb.add(row, xi_off + k, lam * sC[k][a]);
      rb.add(row, b_off + a, -1.0);
    }
  }
  return {rb.finish(std::move(cone)), std::move(lay)};
}

BuiltProgram build_r2(const IEPInstance& inst, bool plus, const RelaxOptions& opts) {
  inst.validate();
  const int n = inst.n, q = inst.q(), d = svec_dim(n);
  const int order = q * d;
  if (order > opts.moment_cap)
    throw Error("R2 moment block would have order " + std::to_string(order) +
                ", above the cap of " + std::to_string(opts.moment_cap));

  ConeSpec cone;
  VariableLayout lay = z_layout(inst, plus ? ProgramKind::R2Plus : ProgramKind::R2, cone);
  cone.blocks.push_back({ConeKind::PSD, order});
  lay.entries.push_back({"W", static_cast<int>(cone.blocks.size()) - 1, lay.total, svec_dim(order)});
  lay.total += svec_dim(order);

  RowBuilder rb(lay.total);
  add_r1_rows(rb, inst, lay);
  const WIndexer W(lay.w_offset(), order);
  auto add_U = [&](int row, int i, int j, int alpha, int beta, double coef) {
    const WEntry e = W(i * d + alpha, j * d + beta);
    rb.add(row, e.col, coef * e.scale);
  };
  // svec(f_{s,t}) has a single nonzero: 1 on the diagonal, 1/√2 off it.
  auto fval = [](int s, int t) { return s == t ? 1.0 : kInvSqrt2; };
  const std::string tag = plus ? "r2+" : "r2";

  // Σ_j W_ij(f_st) = δ_st Z_i
  for (int i = 0; i < q; ++i)
    for (int s = 0; s < n; ++s)
      for (int t = s; t < n; ++t) {
        const int beta = svec_index(s, t, n);
        for (int alpha = 0; alpha < d; ++alpha) {
          const int row = rb.new_row(0.0, tag + ":sum_j W" + std::to_string(i + 1) + "j(f" +
                                              pair_label(s, t) + ")[" + std::to_string(alpha) + "]");
          for (int j = 0; j < q; ++j) add_U(row, i, j, alpha, beta, fval(s, t));
          if (s == t) rb.add(row, lay.z_offset(i) + alpha, -1.0);
        }
      }

  // W_ij(I) = m_j Z_i
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      for (int alpha = 0; alpha < d; ++alpha) {
        const int row = rb.new_row(0.0, tag + ":W" + std::to_string(i + 1) + std::to_string(j + 1) +
                                            "(I)[" + std::to_string(alpha) + "]");
        for (int s = 0; s < n; ++s) add_U(row, i, j, alpha, svec_index(s, s, n), 1.0);
        rb.add(row, lay.z_offset(i) + alpha, -inst.spectrum.mult(j));
      }

  // Σ_r <f_sr, W_ij(f_tr)>, the (s,t) entry of the Z_i Z_j product.
  auto add_product_entry = [&](int row, int i, int j, int s, int t) {
    for (int r = 0; r < n; ++r)
      add_U(row, i, j, svec_index(s, r, n), svec_index(t, r, n), fval(s, r) * fval(t, r));
  };

  // Σ_r <f_sr, W_ii(f_tr)> = (Z_i)_st
  for (int i = 0; i < q; ++i)
    for (int s = 0; s < n; ++s)
      for (int t = s; t < n; ++t) {
        const int row = rb.new_row(0.0, tag + ":idempotence Z" + std::to_string(i + 1) + "(" +
                                            pair_label(s, t) + ")");
        add_product_entry(row, i, i, s, t);
        rb.add(row, lay.z_offset(i) + svec_index(s, t, n), -fval(s, t));
      }

  // Σ_j λ_j W_ij(C_k) = b_k Z_i
  for (int k = 0; k < inst.ell(); ++k) {
    const Eigen::VectorXd sc = svec(inst.constraints[k].C);
    for (int i = 0; i < q; ++i)
      for (int alpha = 0; alpha < d; ++alpha) {
        const int row = rb.new_row(0.0, tag + ":affine[" + std::to_string(k) + "] Z" +
                                            std::to_string(i + 1) + "[" + std::to_string(alpha) + "]");
        for (int j = 0; j < q; ++j)
          for (int beta = 0; beta < d; ++beta)
            if (sc[beta] != 0.0) add_U(row, i, j, alpha, beta, inst.spectrum.value(j) * sc[beta]);
        rb.add(row, lay.z_offset(i) + alpha, -inst.constraints[k].b);
      }
  }

  // Σ_r <f_sr, W_ij(f_tr)> = 0 for i ≠ j. The (j,i) family is the transpose
  // of the (i,j) one, so only i < j is emitted.
  if (plus)
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j)
        for (int s = 0; s < n; ++s)
          for (int t = 0; t < n; ++t) {
            const int row = rb.new_row(0.0, tag + ":orthogonality Z" + std::to_string(i + 1) + "Z" +
                                                std::to_string(j + 1) + "(" + pair_label(s, t) + ")");
            add_product_entry(row, i, j, s, t);
          }

  return {rb.finish(std::move(cone)), std::move(lay)};
}

BuiltProgram build_level(const IEPInstance& inst, Level level, const RelaxOptions& opts) {
  switch (level) {
    case Level::R1: return build_r1(inst);
    case Level::R2: return build_r2(inst, false, opts);
    case Level::R2Plus: return build_r2(inst, true, opts);
  }
  throw Error("unknown level");
}

ConicProgram append_x_constraints(ConicProgram p, const VariableLayout& layout, const Spectrum& spectrum,
                                  const std::vector<AffineConstraint>& extra) {
  if (layout.kind == ProgramKind::Alt1) throw Error("append_x_constraints: Alt-1 has no Z blocks");
  const int m = p.num_rows();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(p.A.nonZeros() + extra.size() * layout.q * svec_dim(layout.n));
  for (int r = 0; r < m; ++r)
    for (SparseMatrix::InnerIterator it(p.A, r); it; ++it) trips.emplace_back(r, it.col(), it.value());
  p.b.conservativeResize(m + static_cast<int>(extra.size()));
  for (std::size_t k = 0; k < extra.size(); ++k) {
    if (extra[k].C.n() != layout.n) throw Error("append_x_constraints: dimension mismatch");
    const Eigen::VectorXd sc = svec(extra[k].C);
    const int row = m + static_cast<int>(k);
    for (int i = 0; i < layout.q; ++i)
      for (int a = 0; a < sc.size(); ++a)
        if (sc[a] != 0.0 && spectrum.value(i) != 0.0)
          trips.emplace_back(row, layout.z_offset(i) + a, spectrum.value(i) * sc[a]);
    p.b[row] = extra[k].b;
    if (!p.row_labels.empty()) p.row_labels.push_back("x-slice[" + std::to_string(k) + "]");
  }
  SparseMatrix A(m + static_cast<int>(extra.size()), p.A.cols());
  A.setFromTriplets(trips.begin(), trips.end());
  p.A = std::move(A);
  return p;
}

Eigen::VectorXd objective_vector(const VariableLayout& layout, const std::vector<SymMatrix>& G) {
  if (layout.kind == ProgramKind::Alt1) throw Error("attach_objective: Alt-1 has no Z variables");
  if (static_cast<int>(G.size()) != layout.q) throw Error("attach_objective: expected q matrices");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(layout.total);
  for (int i = 0; i < layout.q; ++i) {
    if (G[i].n() != layout.n) throw Error("attach_objective: functional has wrong dimension");
    c.segment(layout.z_offset(i), svec_dim(layout.n)) = -svec(G[i]);
  }
  return c;
}

ConicProgram attach_objective(ConicProgram p, const VariableLayout& layout,
                              const std::vector<SymMatrix>& G) {
  p.c = objective_vector(layout, G);
  return p;
}

Decoded decode(const VariableLayout& layout, const Eigen::VectorXd& x, const Spectrum& spectrum) {
  if (x.size() != layout.total) throw Error("decode: vector length does not match layout");
  const int n = layout.n, d = svec_dim(n);
  auto mat = [&](int off, int len) {
    return smat(std::span<const double>(x.data() + off, static_cast<std::size_t>(len)));
  };
  Decoded out;
  if (layout.kind == ProgramKind::Alt1) {
    Cert1 c;
    c.A = mat(layout.find("A").offset, d);
    c.d = x.segment(layout.find("d").offset, layout.q);
    c.xi = layout.ell > 0 ? Eigen::VectorXd(x.segment(layout.find("xi").offset, layout.ell))
                          : Eigen::VectorXd();
    for (int i = 0; i < layout.q; ++i) c.B.push_back(mat(layout.find("B" + std::to_string(i + 1)).offset, d));
    out.cert1 = std::move(c);
    return out;
  }
  if (spectrum.q() != layout.q) throw Error("decode: spectrum does not match layout");
  std::vector<SymMatrix> Z;
  for (int i = 0; i < layout.q; ++i) Z.push_back(mat(layout.z_offset(i), d));
  out.candidate = CandidateSolution::from_projectors(std::move(Z), spectrum);
  if (layout.has("W")) {
    MomentBlocks mb;
    mb.q = layout.q;
    mb.d = d;
    const auto& e = layout.find("W");
    Eigen::MatrixXd w;
    smat_into({x.data() + e.offset, static_cast<std::size_t>(e.length)}, w);
    mb.W = std::move(w);
    out.moments = std::move(mb);
  }
  return out;
}

Eigen::VectorXd encode(const VariableLayout& layout, const CandidateSolution& cand,
                       const std::optional<MomentBlocks>& moments) {
  if (layout.kind == ProgramKind::Alt1) throw Error("encode: Alt-1 layout needs a Cert1");
  if (static_cast<int>(cand.Z.size()) != layout.q) throw Error("encode: wrong number of blocks");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.total);
  const int d = svec_dim(layout.n);
  for (int i = 0; i < layout.q; ++i) x.segment(layout.z_offset(i), d) = svec(cand.Z[i]);
  if (layout.has("W")) {
    const MomentBlocks mb = moments ? *moments : MomentBlocks::lift(cand);
    const auto& e = layout.find("W");
    if (mb.W.rows() != layout.w_order()) throw Error("encode: moment block has wrong order");
    svec_into(mb.W, {x.data() + e.offset, static_cast<std::size_t>(e.length)});
  }
  return x;
}

Eigen::VectorXd encode(const VariableLayout& layout, const Cert1& cert) {
  if (layout.kind != ProgramKind::Alt1) throw Error("encode: not an Alt-1 layout");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.total);
  const int d = svec_dim(layout.n);
  x.segment(layout.find("A").offset, d) = svec(cert.A);
  x.segment(layout.find("d").offset, layout.q) = cert.d;
  if (layout.ell > 0) x.segment(layout.find("xi").offset, layout.ell) = cert.xi;
  for (int i = 0; i < layout.q; ++i)
    x.segment(layout.find("B" + std::to_string(i + 1)).offset, d) = svec(cert.B[i]);
  return x;
}

}  // namespace iep
