#include "iep/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace iep {

Spectrum::Spectrum(std::vector<Eigenpair> pairs, double merge_tol) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw Error("spectrum: q must be at least 1");
  std::stable_sort(pairs_.begin(), pairs_.end(),
                   [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });
  n_ = 0;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (!std::isfinite(pairs_[i].value)) throw Error("spectrum: eigenvalue is not finite");
    if (pairs_[i].mult <= 0) throw Error("spectrum: multiplicities must be positive");
    if (i > 0 && pairs_[i].value - pairs_[i - 1].value <= merge_tol)
      throw Error("spectrum: eigenvalues " + std::to_string(pairs_[i - 1].value) + " and " +
                  std::to_string(pairs_[i].value) + " are not distinct");
    n_ += pairs_[i].mult;
  }
}

Spectrum Spectrum::from_values(std::vector<double> values, double merge_tol,
                               double ambiguity_floor) {
  if (values.empty()) throw Error("spectrum: no eigenvalues given");
  std::sort(values.begin(), values.end());
  std::vector<Eigenpair> pairs;
  double sum = values.front();
  int count = 1;
  auto flush = [&] { pairs.push_back({sum / count, count}); };
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double gap = values[k] - values[k - 1];
    if (ambiguity_floor > 0.0 && gap > ambiguity_floor && gap <= merge_tol)
      throw Error("spectrum: eigenvalue gap " + std::to_string(gap) +
                  " is inside the ambiguous grouping band");
    if (gap <= merge_tol) {
      sum += values[k];
      ++count;
    } else {
      flush();
      sum = values[k];
      count = 1;
    }
  }
  flush();
  // Integers perturbed by eigensolver roundoff are snapped back.
  for (auto& p : pairs) {
    const double r = std::round(p.value);
    if (std::abs(p.value - r) <= 1e-12 * std::max(1.0, std::abs(r))) p.value = r;
  }
  return Spectrum(std::move(pairs), 0.0);
}

std::vector<double> Spectrum::expanded_ascending() const {
  std::vector<double> out;
  out.reserve(n_);
  for (const auto& p : pairs_) out.insert(out.end(), p.mult, p.value);
  return out;
}

std::vector<double> Spectrum::expanded_descending() const {
  auto out = expanded_ascending();
  std::reverse(out.begin(), out.end());
  return out;
}

void IEPInstance::validate() const {
  if (n <= 0) throw Error("instance: n must be positive");
  if (spectrum.q() < 1) throw Error("instance: spectrum is empty");
  if (spectrum.n() != n)
    throw Error("instance: multiplicities sum to " + std::to_string(spectrum.n()) +
                " but n = " + std::to_string(n));
  for (std::size_t k = 0; k < constraints.size(); ++k) {
    const auto& c = constraints[k];
    if (c.C.n() != n)
      throw Error("instance: constraint " + std::to_string(k) + " has dimension " +
                  std::to_string(c.C.n()) + ", expected " + std::to_string(n));
    if (!std::isfinite(c.b) || !c.C.dense().allFinite())
      throw Error("instance: constraint " + std::to_string(k) + " has non-finite data");
  }
}

CandidateSolution CandidateSolution::from_projectors(std::vector<SymMatrix> Z,
                                                     const Spectrum& spectrum) {
  if (static_cast<int>(Z.size()) != spectrum.q())
    throw Error("candidate: expected " + std::to_string(spectrum.q()) + " matrices");
  const int n = Z.empty() ? 0 : Z.front().n();
  SymMatrix X(n);
  for (int i = 0; i < spectrum.q(); ++i) {
    if (Z[i].n() != n) throw Error("candidate: inconsistent dimensions");
    X += spectrum.value(i) * Z[i];
  }
  return {std::move(Z), std::move(X)};
}

CandidateSolution spectral_projectors(const SymMatrix& X, const Spectrum& spectrum) {
  if (X.n() != spectrum.n()) throw Error("spectral_projectors: dimension mismatch");
  const EigenDecomposition e = eigh(X);
  std::vector<SymMatrix> Z;
  int col = 0;
  for (int i = 0; i < spectrum.q(); ++i) {
    const int m = spectrum.mult(i);
    const Eigen::MatrixXd V = e.vectors.middleCols(col, m);
    Z.push_back(SymMatrix::symmetrized(V * V.transpose()));
    col += m;
  }
  CandidateSolution out;
  out.X = X;
  out.Z = std::move(Z);
  return out;
}

double Residuals::max() const { return std::max({r_part, r_trace, r_idem, r_aff}); }

double affine_residual(const IEPInstance& inst, const SymMatrix& X) {
  double worst = 0.0;
  for (const auto& c : inst.constraints) worst = std::max(worst, std::abs(inner(c.C, X) - c.b));
  return worst;
}

Residuals residuals(const IEPInstance& inst, const CandidateSolution& cand) {
  const int q = inst.q();
  if (static_cast<int>(cand.Z.size()) != q) throw Error("residuals: wrong number of projectors");
  for (const auto& z : cand.Z)
    if (z.n() != inst.n) throw Error("residuals: dimension mismatch");

  Residuals r;
  Eigen::MatrixXd sum = -Eigen::MatrixXd::Identity(inst.n, inst.n);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(inst.n, inst.n);
  for (int i = 0; i < q; ++i) {
    const Eigen::MatrixXd& z = cand.Z[i].dense();
    sum += z;
    X += inst.spectrum.value(i) * z;
    r.r_trace = std::max(r.r_trace, std::abs(z.trace() - inst.spectrum.mult(i)));
    r.r_idem = std::max(r.r_idem, (z * z - z).norm());
  }
  r.r_part = sum.norm();
  r.r_aff = affine_residual(inst, SymMatrix::symmetrized(X));
  return r;
}

// ---------------------------------------------------------------------------

namespace {

SymMatrix gaussian_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) g(s, t) = normal(rng);
  return SymMatrix::symmetrized(g);
}

}  // namespace

IEPInstance gen_random(int n, const Spectrum& spectrum, int ell, std::uint64_t seed,
                       const std::optional<SymMatrix>& planted) {
  if (spectrum.n() != n) throw Error("gen_random: spectrum does not sum to n");
  if (ell < 0) throw Error("gen_random: negative number of constraints");
  if (planted) {
    if (planted->n() != n) throw Error("gen_random: planted matrix has wrong dimension");
    const Eigen::VectorXd got = eigenvalues(*planted);
    const auto want = spectrum.expanded_ascending();
    for (int k = 0; k < n; ++k)
      if (std::abs(got[k] - want[k]) > 1e-8)
        throw Error("gen_random: planted matrix spectrum does not match");
  }
  IEPInstance inst;
  inst.n = n;
  inst.spectrum = spectrum;
  inst.label = "random n=" + std::to_string(n) + " ell=" + std::to_string(ell) +
               " seed=" + std::to_string(seed) + (planted ? " planted" : "");
  std::mt19937_64 rng(seed);
  for (int k = 0; k < ell; ++k) {
    SymMatrix C = gaussian_symmetric(n, rng);
    const double b = planted ? inner(C, *planted) : 0.0;
    inst.constraints.push_back({std::move(C), b});
  }
  return inst;
}

double sturm_liouville_scale(int n) {
  return (n + 1.0) * (n + 1.0) / (std::numbers::pi * std::numbers::pi);
}

IEPInstance gen_sturm_liouville(int n, const std::vector<double>& eigenvalues) {
  if (static_cast<int>(eigenvalues.size()) != n)
    throw Error("gen_sturm_liouville: expected " + std::to_string(n) + " eigenvalues");
  IEPInstance inst;
  inst.n = n;
  inst.spectrum = Spectrum::from_values(eigenvalues);
  inst.label = "sturm-liouville n=" + std::to_string(n);
  const double scale = sturm_liouville_scale(n);
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t)
      inst.constraints.push_back({basis_f(s, t, n), t == s + 1 ? -scale : 0.0});
  inst.validate();
  return inst;
}

IEPInstance gen_toeplitz(int n, const Spectrum& spectrum) {
  if (spectrum.n() != n) throw Error("gen_toeplitz: spectrum does not sum to n");
  IEPInstance inst;
  inst.n = n;
  inst.spectrum = spectrum;
  inst.label = "toeplitz n=" + std::to_string(n);
  for (int o = 0; o < n; ++o)
    for (int s = 0; s + o + 1 < n; ++s)
      inst.constraints.push_back({basis_f(s, s + o, n) - basis_f(s + 1, s + 1 + o, n), 0.0});
  return inst;
}

namespace {

void require_adjacency(const SymMatrix& a, const char* name) {
  for (int s = 0; s < a.n(); ++s) {
    if (a(s, s) != 0.0) throw Error(std::string(name) + " has a nonzero diagonal");
    for (int t = s + 1; t < a.n(); ++t)
      if (a(s, t) != 0.0 && a(s, t) != 1.0)
        throw Error(std::string(name) + " is not a 0/1 adjacency matrix");
  }
}

}  // namespace

IEPInstance gen_induced_subgraph(const SymMatrix& A, const SymMatrix& Aprime) {
  const int n = A.n();
  const int np = Aprime.n();
  if (np >= n) throw Error("gen_induced_subgraph: pattern graph must be smaller");
  require_adjacency(A, "host graph");
  require_adjacency(Aprime, "pattern graph");

  std::vector<double> values;
  const Eigen::VectorXd ev = eigenvalues(Aprime);
  values.assign(ev.data(), ev.data() + ev.size());
  values.insert(values.end(), n - np, 0.0);

  IEPInstance inst;
  inst.n = n;
  inst.spectrum = Spectrum::from_values(values, 1e-6, 1e-9);
  inst.label = "induced-subgraph n=" + std::to_string(n) + " n'=" + std::to_string(np);
  inst.constraints.push_back({A, Aprime.dense().sum()});
  for (int s = 0; s < n; ++s)
    for (int t = s; t < n; ++t)
      if (A(s, t) == 0.0) inst.constraints.push_back({basis_f(s, t, n), 0.0});
  return inst;
}

SymMatrix erdos_renyi(int n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SymMatrix a(n);
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t)
      if (unif(rng) < p) a.set(s, t, 1.0);
  return a;
}

SymMatrix octahedral_graph() {
  SymMatrix a(6);
  for (int s = 0; s < 6; ++s)
    for (int t = s + 1; t < 6; ++t)
      if (t != s + 3) a.set(s, t, 1.0);
  return a;
}

}  // namespace iep
