#include "iep/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace iep {

namespace {

template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  jobs = std::clamp(jobs, 1, std::max(count, 1));
  if (jobs == 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (int k; (k = next++) < count;) fn(k);
    });
  for (auto& th : pool) th.join();
}

bool over_cap(const IEPInstance& inst, Level level, const RelaxOptions& relax) {
  return level != Level::R1 && inst.q() * svec_dim(inst.n) > relax.moment_cap;
}

}  // namespace

std::string grid_status(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "feasible";
    case Verdict::Certified: return "infeasible";
    default: return "undetermined";
  }
}

std::string grid_class(const GridPoint& p) {
  if (p.r1 == Verdict::Certified && p.r2 == Verdict::Certified) return "both-infeasible";
  if (p.r1 == Verdict::Feasible && p.r2 == Verdict::Certified) return "r1-feasible-r2-infeasible";
  if (p.r1 == Verdict::Feasible && p.r2 == Verdict::Feasible) return "both-feasible";
  return "undetermined";
}

IEPInstance grid_s3_base(int ell, std::uint64_t seed) {
  IEPInstance inst = gen_random(3, Spectrum({{-1.0, 1}, {0.0, 1}, {1.0, 1}}), ell, seed);
  inst.label = "grid-s3 ell=" + std::to_string(ell) + " seed=" + std::to_string(seed);
  return inst;
}

namespace {

struct GridSlice {
  Level level;
  BuiltProgram built;
  ConicSolver solver;

  GridSlice(const IEPInstance& base, Level lv, const ExperimentOptions& opts)
      : level(lv),
        built(slice(base, lv, opts.relax)),
        solver(built.program.cone, built.program.A, opts.solver) {}

  static BuiltProgram slice(const IEPInstance& base, Level lv, const RelaxOptions& relax) {
    BuiltProgram bp = build_level(base, lv, relax);
    bp.program = append_x_constraints(std::move(bp.program), bp.layout, base.spectrum,
                                      {{basis_f(0, 0, 3), 0.0}, {basis_f(1, 1, 3), 0.0}});
    return bp;
  }

  Verdict at(const Spectrum& spectrum, double v1, double v2) const {
    ConicProgram p = built.program;
    const int m = p.num_rows();
    p.b[m - 2] = v1;
    p.b[m - 1] = v2;
    return certify_program(solver, p, built.layout, level, spectrum).verdict;
  }
};

}  // namespace

std::vector<GridPoint> run_grid_s3(int ell, std::uint64_t seed, int resolution, const ExperimentOptions& opts) {
  if (resolution < 2) throw Error("grid-s3: resolution must be at least 2");
  const IEPInstance base = grid_s3_base(ell, seed);
  const GridSlice r1(base, Level::R1, opts), r2(base, Level::R2, opts);
  std::vector<GridPoint> grid(resolution * resolution);
  parallel_for(static_cast<int>(grid.size()), opts.jobs, [&](int k) {
    GridPoint& p = grid[k];
    p.v1 = -1.0 + 2.0 * (k / resolution) / (resolution - 1);
    p.v2 = -1.0 + 2.0 * (k % resolution) / (resolution - 1);
    p.r1 = r1.at(base.spectrum, p.v1, p.v2);
    p.r2 = r2.at(base.spectrum, p.v1, p.v2);
  });
  return grid;
}

std::string grid_to_csv(const std::vector<GridPoint>& grid) {
  std::ostringstream os;
  os << "v1,v2,r1_status,r2_status,class\n";
  for (const auto& p : grid)
    os << p.v1 << ',' << p.v2 << ',' << grid_status(p.r1) << ',' << grid_status(p.r2) << ',' << grid_class(p)
       << '\n';
  return os.str();
}

IEPInstance pipeline_instance(const std::string& id) {
  IEPInstance inst;
  if (id == "sturm5-int")
    inst = gen_sturm_liouville(5, {1, 2, 3, 4, 5});
  else if (id == "sturm5-squares")
    inst = gen_sturm_liouville(5, {1, 4, 9, 16, 25});
  else if (id == "toeplitz5")
    inst = gen_toeplitz(5, Spectrum({{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}}));
  else if (id == "toeplitz8")
    inst = gen_toeplitz(8, Spectrum({{-1, 4}, {1, 4}}));
  else
    throw Error("unknown pipeline experiment '" + id + "'");
  inst.label = id;
  return inst;
}

PipelineResult run_pipeline(const std::string& id, const IEPInstance& inst, const std::vector<Level>& levels,
                            int trials, std::uint64_t base_seed, const ExperimentOptions& opts) {
  PipelineResult out;
  out.id = id;
  out.inst = inst;
  out.cert1 = certify_r1_infeasible(inst, opts.solver);
  for (Level level : levels) {
    LevelRun run;
    run.level = level;
    if (over_cap(inst, level, opts.relax)) {
      run.note = "skipped: moment block exceeds cap";
      out.levels.push_back(std::move(run));
      continue;
    }
    run.feasibility = certify_level(inst, level, opts.solver, opts.relax);
    if (run.feasibility->verdict == Verdict::Certified) {
      run.note = "certified infeasible; rounding skipped";
    } else if (trials > 0) {
      RoundingOptions ro;
      ro.solver = opts.solver;
      ro.relax = opts.relax;
      ro.jobs = opts.jobs;
      run.rounding = round_many(inst, level, trials, base_seed, ro);
    }
    out.levels.push_back(std::move(run));
  }
  return out;
}

std::string pipeline_summary_json(const PipelineResult& r) {
  using nlohmann::json;
  json levels = json::array();
  for (const auto& lv : r.levels) {
    json j = {{"level", to_string(lv.level)}, {"note", lv.note}};
    if (lv.feasibility) {
      j["verdict"] = to_string(lv.feasibility->verdict);
      j["status"] = to_string(lv.feasibility->status);
      j["iterations"] = lv.feasibility->iterations;
      j["solve_time_s"] = lv.feasibility->solve_time_s;
    }
    if (lv.rounding) {
      j["trials"] = lv.rounding->trials;
      j["successes"] = lv.rounding->successes;
    }
    levels.push_back(std::move(j));
  }
  json doc = {{"id", r.id},
              {"label", r.inst.label},
              {"cert1",
               {{"verdict", to_string(r.cert1.verdict)},
                {"status", to_string(r.cert1.status)},
                {"normalization", r.cert1.check.normalization},
                {"coupling", r.cert1.check.coupling},
                {"min_eig", r.cert1.check.min_eig}}},
              {"levels", std::move(levels)}};
  return doc.dump(2);
}

std::string SubgraphRow::certified_at() const {
  if (cert1.verdict == Verdict::Certified || (r1 && r1->verdict == Verdict::Certified)) return "r1";
  if (r2plus && r2plus->verdict == Verdict::Certified) return "r2plus";
  return "none";
}

std::vector<SubgraphRow> run_octahedral(int n, double p, int seeds, std::uint64_t base_seed, bool try_r2plus,
                                        const ExperimentOptions& opts) {
  std::vector<SubgraphRow> rows(seeds);
  const SymMatrix oct = octahedral_graph();
  parallel_for(seeds, opts.jobs, [&](int k) {
    SubgraphRow& row = rows[k];
    row.seed = base_seed + k;
    const SymMatrix A = erdos_renyi(n, p, row.seed);
    row.edges = static_cast<int>(std::lround(A.dense().sum() / 2));
    const IEPInstance inst = gen_induced_subgraph(A, oct);
    row.cert1 = certify_r1_infeasible(inst, opts.solver);
    row.r1 = certify_level(inst, Level::R1, opts.solver, opts.relax);
    if (!try_r2plus || row.certified_at() == "r1") return;
    if (over_cap(inst, Level::R2Plus, opts.relax))
      row.note = "r2plus skipped: moment block exceeds cap";
    else
      row.r2plus = certify_level(inst, Level::R2Plus, opts.solver, opts.relax);
  });
  return rows;
}

std::string octahedral_to_csv(const std::vector<SubgraphRow>& rows) {
  std::ostringstream os;
  os << "seed,edges,cert1,r1,r2plus,certified_at,note\n";
  for (const auto& r : rows)
    os << r.seed << ',' << r.edges << ',' << to_string(r.cert1.verdict) << ','
       << (r.r1 ? to_string(r.r1->verdict) : "not-run") << ','
       << (r.r2plus ? to_string(r.r2plus->verdict) : "not-run") << ',' << r.certified_at() << ',' << r.note
       << '\n';
  return os.str();
}

std::vector<Prop2Row> run_prop2(int n, int ell_lo, int ell_hi, int reps, std::uint64_t base_seed,
                                const ExperimentOptions& opts) {
  if (n < 1 || ell_lo < 0 || ell_hi < ell_lo || reps < 1) throw Error("prop2: bad parameters");
  std::vector<Eigenpair> pairs;
  std::vector<double> diag;
  for (int k = n; k >= 1; --k) {
    pairs.push_back({static_cast<double>(k), 1});
    diag.push_back(k);
  }
  const Spectrum spectrum(pairs);
  const SymMatrix planted = SymMatrix::diagonal(diag);

  const int levels = ell_hi - ell_lo + 1;
  std::vector<char> unique(levels * reps, 0), recovered(levels * reps, 0);
  parallel_for(levels * reps, opts.jobs, [&](int k) {
    const int ell = ell_lo + k / reps, rep = k % reps;
    const std::uint64_t seed = base_seed + 1000 * static_cast<std::uint64_t>(ell) + rep;
    const IEPInstance inst = gen_random(n, spectrum, ell, seed, planted);
    const BuiltProgram bp = build_r1(inst);
    const ConicSolver solver(bp.program.cone, bp.program.A, opts.solver);
    std::optional<SymMatrix> X[2];
    for (int a = 0; a < 2; ++a) {
      const auto G = sample_spectral_functional(2 * seed + a + 1, spectrum);
      const ConicSolution sol = solver.solve(bp.program.b, objective_vector(bp.layout, G));
      if (sol.status != SolveStatus::Optimal) return;
      X[a] = decode(bp.layout, sol.x, spectrum).candidate->X;
    }
    if ((*X[0] - *X[1]).frobenius_norm() > 1e-4) return;
    unique[k] = 1;
    recovered[k] = (*X[0] - planted).frobenius_norm() <= 1e-4;
  });

  std::vector<Prop2Row> rows;
  for (int l = 0; l < levels; ++l) {
    Prop2Row row;
    row.ell = ell_lo + l;
    row.reps = reps;
    for (int r = 0; r < reps; ++r) {
      row.unique += unique[l * reps + r];
      row.planted_recovered += recovered[l * reps + r];
    }
    rows.push_back(row);
  }
  return rows;
}

std::string prop2_to_csv(const std::vector<Prop2Row>& rows) {
  std::ostringstream os;
  os << "ell,reps,unique,planted_recovered,rate\n";
  for (const auto& r : rows)
    os << r.ell << ',' << r.reps << ',' << r.unique << ',' << r.planted_recovered << ','
       << static_cast<double>(r.unique) / r.reps << '\n';
  return os.str();
}

}  // namespace iep
