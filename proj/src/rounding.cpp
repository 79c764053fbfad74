#include "iep/rounding.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace iep {

namespace {

SymMatrix gaussian_sym(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd H(n, n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) H(s, t) = N(rng);
  return SymMatrix::symmetrized(H);
}

}  // namespace

std::vector<SymMatrix> sample_functional(std::uint64_t seed, int q, int n) {
  std::mt19937_64 rng(seed);
  std::vector<SymMatrix> G;
  G.reserve(q);
  for (int i = 0; i < q; ++i) G.push_back(gaussian_sym(rng, n));
  return G;
}

std::vector<SymMatrix> sample_spectral_functional(std::uint64_t seed, const Spectrum& spectrum) {
  std::mt19937_64 rng(seed);
  const SymMatrix G = gaussian_sym(rng, spectrum.n());
  std::vector<SymMatrix> out;
  for (int i = 0; i < spectrum.q(); ++i) out.push_back(spectrum.value(i) * G);
  return out;
}

std::string to_string(FunctionalMode m) {
  return m == FunctionalMode::Spectral ? "spectral" : "independent";
}

FunctionalMode parse_functional_mode(const std::string& s) {
  if (s == "spectral") return FunctionalMode::Spectral;
  if (s == "independent") return FunctionalMode::Independent;
  throw Error("unknown functional mode '" + s + "' (expected spectral or independent)");
}

std::vector<SymMatrix> sample_functional(std::uint64_t seed, const Spectrum& spectrum, FunctionalMode mode) {
  if (mode == FunctionalMode::Spectral) return sample_spectral_functional(seed, spectrum);
  return sample_functional(seed, spectrum.q(), spectrum.n());
}

void judge(const IEPInstance& inst, const CandidateSolution& cand, double tau, double tau_spec,
           TrialRecord& rec) {
  rec.residuals = residuals(inst, cand);
  const Eigen::VectorXd ev = eigenvalues(cand.X);
  const std::vector<double> target = inst.spectrum.expanded_ascending();
  rec.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  rec.spectrum_error = 0.0;
  for (int k = 0; k < inst.n; ++k)
    rec.spectrum_error = std::max(rec.spectrum_error, std::abs(ev[k] - target[k]));
  rec.accepted = rec.residuals.within(tau) && rec.spectrum_error <= tau_spec;
}

Rounder::Rounder(const IEPInstance& inst, RoundingOptions opts)
    : inst_(inst),
      opts_(std::move(opts)),
      built_(build_level(inst_, opts_.level, opts_.relax)),
      solver_(built_.program.cone, built_.program.A, opts_.solver) {}

TrialRecord Rounder::trial(std::uint64_t seed) const {
  const auto t0 = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.seed = seed;
  rec.level = opts_.level;
  const Eigen::VectorXd c = objective_vector(built_.layout, sample_functional(seed, inst_.spectrum, opts_.mode));
  const ConicSolution sol = solver_.solve(built_.program.b, c);
  rec.status = sol.status;
  rec.iterations = sol.iterations;
  if (sol.x.size() == built_.layout.total && sol.x.allFinite()) {
    CandidateSolution cand = *decode(built_.layout, sol.x, inst_.spectrum).candidate;
    judge(inst_, cand, opts_.tau, opts_.tau_spec, rec);
    rec.candidate = std::move(cand);
  }
  if (sol.status != SolveStatus::Optimal) rec.accepted = false;
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

RoundingReport Rounder::run(int trials, std::uint64_t base_seed) const {
  if (trials < 1) throw Error("round_many: trials must be at least 1");
  RoundingReport rep;
  rep.level = opts_.level;
  rep.trials = trials;
  rep.records.resize(trials);
  const int jobs = std::clamp(opts_.jobs, 1, trials);
  if (jobs == 1) {
    for (int t = 0; t < trials; ++t) rep.records[t] = trial(base_seed + t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&] {
        for (int t; (t = next++) < trials;) rep.records[t] = trial(base_seed + t);
      });
    for (auto& th : pool) th.join();
  }
  rep.successes = static_cast<int>(std::count_if(rep.records.begin(), rep.records.end(),
                                                 [](const TrialRecord& r) { return r.accepted; }));
  return rep;
}

TrialRecord round_once(const IEPInstance& inst, Level level, std::uint64_t seed, RoundingOptions opts) {
  opts.level = level;
  return Rounder(inst, std::move(opts)).trial(seed);
}

RoundingReport round_many(const IEPInstance& inst, Level level, int trials, std::uint64_t base_seed,
                          RoundingOptions opts) {
  opts.level = level;
  return Rounder(inst, std::move(opts)).run(trials, base_seed);
}

namespace {

nlohmann::json matrix_json(const SymMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int s = 0; s < m.n(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int t = 0; t < m.n(); ++t) row.push_back(m(s, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string report_to_json(const RoundingReport& rep, bool include_matrices) {
  using nlohmann::json;
  json recs = json::array();
  for (const auto& r : rep.records) {
    json j = {{"seed", r.seed},
              {"level", to_string(r.level)},
              {"status", to_string(r.status)},
              {"residuals",
               {{"r_part", r.residuals.r_part},
                {"r_trace", r.residuals.r_trace},
                {"r_idem", r.residuals.r_idem},
                {"r_aff", r.residuals.r_aff}}},
              {"eigenvalues", r.eigenvalues},
              {"spectrum_error", r.spectrum_error},
              {"accepted", r.accepted},
              {"wall_time_s", r.wall_time_s},
              {"iterations", r.iterations}};
    if (include_matrices && r.candidate) j["X"] = matrix_json(r.candidate->X);
    recs.push_back(std::move(j));
  }
  json doc = {{"level", to_string(rep.level)},
              {"trials", rep.trials},
              {"successes", rep.successes},
              {"records", std::move(recs)}};
  return doc.dump(2);
}

std::string report_to_csv(const RoundingReport& rep) {
  std::ostringstream os;
  os.precision(6);
  os << std::scientific;
  os << "seed,level,status,r_part,r_trace,r_idem,r_aff,spectrum_error,accepted,iterations\n";
  for (const auto& r : rep.records)
    os << r.seed << ',' << to_string(r.level) << ',' << to_string(r.status) << ',' << r.residuals.r_part << ','
       << r.residuals.r_trace << ',' << r.residuals.r_idem << ',' << r.residuals.r_aff << ','
       << r.spectrum_error << ',' << (r.accepted ? 1 : 0) << ',' << r.iterations
       << '\n';
  return os.str();
}

bool oracle_feasible_n2(const IEPInstance& inst) {
  if (inst.n != 2 || inst.q() != 2 || inst.spectrum.mult(0) != 1 || inst.spectrum.mult(1) != 1)
    throw Error("oracle_feasible_n2: needs n = 2 with two simple eigenvalues");
  if (inst.ell() == 0) return true;
  constexpr double kStep = 1e-4, kTol = 1e-6;
  const double l1 = inst.spectrum.value(0), l2 = inst.spectrum.value(1);
  const double mean = 0.5 * (l1 + l2), half = 0.5 * (l1 - l2);

  // X(θ) = mean·I + half·[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]
  auto worst = [&](double th) {
    const double c = std::cos(2 * th), s = std::sin(2 * th);
    double w = 0.0;
    for (const auto& k : inst.constraints) {
      const double v = mean * (k.C(0, 0) + k.C(1, 1)) + half * (c * (k.C(0, 0) - k.C(1, 1)) + 2 * s * k.C(0, 1));
      w = std::max(w, std::abs(v - k.b));
    }
    return w;
  };

  double lip = 0.0;
  for (const auto& k : inst.constraints)
    lip = std::max(lip, 2 * std::abs(half) * (std::abs(k.C(0, 0) - k.C(1, 1)) + 2 * std::abs(k.C(0, 1))));
  const double near = kTol + lip * kStep;

  const int steps = static_cast<int>(std::ceil(std::numbers::pi / kStep));
  std::vector<double> f(steps);
  for (int j = 0; j < steps; ++j) f[j] = worst(j * kStep);
  for (int j = 0; j < steps; ++j) {
    if (f[j] <= kTol) return true;
    const double prev = f[(j + steps - 1) % steps], next = f[(j + 1) % steps];
    if (f[j] > near || f[j] > prev || f[j] > next) continue;
    double a = (j - 1) * kStep, b = (j + 1) * kStep;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = worst(x1), f2 = worst(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        b = x2, x2 = x1, f2 = f1;
        x1 = b - g * (b - a), f1 = worst(x1);
      } else {
        a = x1, x1 = x2, f1 = f2;
        x2 = a + g * (b - a), f2 = worst(x2);
      }
    }
    if (std::min(f1, f2) <= kTol) return true;
  }
  return false;
}

}  // namespace iep
