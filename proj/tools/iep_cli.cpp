// iep: command-line front end for affine inverse eigenvalue problems.

#include "iep/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitFeasible = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitCertified = 3;
constexpr int kExitUndetermined = 4;

json matrix_json(const iep::SymMatrix& m) {
  json rows = json::array();
  for (int s = 0; s < m.n(); ++s) {
    json row = json::array();
    for (int t = 0; t < m.n(); ++t) row.push_back(m(s, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw iep::Error("cannot write " + path);
  f << text << '\n';
}

void write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw iep::Error("cannot write " + (dir / name).string());
  f << text;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
  return out;
}

// "1:1,2:3" → {(1,1), (2,3)}; a bare value means multiplicity 1.
iep::Spectrum parse_spectrum(const std::string& s) {
  std::vector<iep::Eigenpair> pairs;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      pairs.push_back({std::stod(item), 1});
    else
      pairs.push_back({std::stod(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
  }
  return iep::Spectrum(pairs);
}

std::pair<int, int> parse_range(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw iep::Error("range must look like LO..HI, got '" + s + "'");
  return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
}

struct SolveArgs {
  std::string path, level = "r1", out;
  double eps = 1e-7;
  int max_iter = 200000;
  std::uint64_t seed = 0;
};

iep::SolverOptions solver_options(double eps, int max_iter, std::uint64_t seed) {
  iep::SolverOptions o;
  o.eps = eps;
  o.max_iter = max_iter;
  o.seed = seed;
  return o;
}

int cmd_validate(const std::string& path) {
  try {
    const iep::IEPInstance inst = iep::load_instance(path);
    std::cout << "valid: n=" << inst.n << " q=" << inst.q() << " ell=" << inst.ell() << '\n';
    return 0;
  } catch (const iep::Error& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  }
}

int cmd_solve(const SolveArgs& a) {
  iep::IEPInstance inst;
  try {
    inst = iep::load_instance(a.path);
  } catch (const iep::Error& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  }
  const iep::Level level = iep::parse_level(a.level);
  const iep::SolverOptions opts = solver_options(a.eps, a.max_iter, a.seed);

  if (level == iep::Level::R1) {
    const iep::Cert1Result c = iep::certify_r1_infeasible(inst, opts);
    if (c.verdict == iep::Verdict::Certified) {
      std::cout << "status: certified-infeasible (cert1)\n";
      emit(iep::cert1_to_json(*c.cert, c.check), a.out);
      return kExitCertified;
    }
  }
  const iep::LevelReport rep = iep::certify_level(inst, level, opts);
  std::cout << "status: " << iep::to_string(rep.verdict) << " (solver " << iep::to_string(rep.status) << ", "
            << rep.iterations << " iterations)\n";
  if (rep.verdict == iep::Verdict::Certified) {
    emit(iep::farkas_to_json(rep), a.out);
    return kExitCertified;
  }
  if (rep.verdict == iep::Verdict::Feasible && rep.point) {
    json Z = json::array();
    for (const auto& z : rep.point->Z) Z.push_back(matrix_json(z));
    const iep::Residuals r = iep::residuals(inst, *rep.point);
    json doc = {{"status", "feasible"},
                {"level", iep::to_string(level)},
                {"Z", std::move(Z)},
                {"X", matrix_json(rep.point->X)},
                {"residuals", {{"r_part", r.r_part}, {"r_trace", r.r_trace}, {"r_idem", r.r_idem}, {"r_aff", r.r_aff}}}};
    emit(doc.dump(2), a.out);
    return kExitFeasible;
  }
  return kExitUndetermined;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affine inverse eigenvalue problems: relaxations, certificates and rounding"};
  app.require_subcommand(1);
  int code = 0;

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("path", validate_path, "instance JSON")->required();
  validate->callback([&] { code = cmd_validate(validate_path); });

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Decide feasibility of a relaxation");
  solve->add_option("path", sa.path, "instance JSON")->required();
  solve->add_option("--level", sa.level, "r1, r2 or r2plus")->capture_default_str();
  solve->add_option("--eps", sa.eps, "solver tolerance")->capture_default_str();
  solve->add_option("--max-iter", sa.max_iter, "iteration cap")->capture_default_str();
  solve->add_option("--seed", sa.seed, "solver seed")->capture_default_str();
  solve->add_option("--out", sa.out, "write the point or certificate here instead of stdout");
  solve->callback([&] { code = cmd_solve(sa); });

  std::string round_path, round_level = "r1", round_out, functional = "spectral";
  int trials = 100, jobs = 1;
  std::uint64_t round_seed = 0;
  double round_eps = 1e-7;
  auto* round = app.add_subcommand("round", "Random-functional rounding trials");
  round->add_option("path", round_path, "instance JSON")->required();
  round->add_option("--level", round_level, "r1, r2 or r2plus")->capture_default_str();
  round->add_option("--trials", trials, "number of trials")->capture_default_str();
  round->add_option("--seed", round_seed, "seed of the first trial")->capture_default_str();
  round->add_option("--eps", round_eps, "solver tolerance")->capture_default_str();
  round->add_option("--functional", functional, "spectral or independent")->capture_default_str();
  round->add_option("--jobs", jobs, "worker threads")->capture_default_str();
  round->add_option("--out", round_out, "output directory");
  round->callback([&] {
    const iep::IEPInstance inst = iep::load_instance(round_path);
    iep::RoundingOptions ro;
    ro.solver.eps = round_eps;
    ro.mode = iep::parse_functional_mode(functional);
    ro.jobs = jobs;
    const iep::RoundingReport rep = iep::round_many(inst, iep::parse_level(round_level), trials, round_seed, ro);
    std::cout << "accepted " << rep.successes << " / " << rep.trials << " at " << iep::to_string(rep.level) << '\n';
    if (!round_out.empty()) {
      write_file(round_out, "report.json", iep::report_to_json(rep, true));
      write_file(round_out, "trials.csv", iep::report_to_csv(rep));
    }
  });

  std::string gen_family, gen_out, gen_spectrum = "1,2,3,4,5", gen_eigs = "1,2,3,4,5";
  int gen_n = 5, gen_ell = 3;
  double gen_p = 0.2;
  std::uint64_t gen_seed = 0;
  auto* generate = app.add_subcommand("generate", "Write an instance file");
  generate->add_option("family", gen_family, "sturm, toeplitz, random or subgraph")->required();
  generate->add_option("--n", gen_n, "dimension (graph order for subgraph)")->capture_default_str();
  generate->add_option("--spectrum", gen_spectrum, "value[:mult],... for toeplitz and random")
      ->capture_default_str();
  generate->add_option("--eigenvalues", gen_eigs, "comma list for sturm")->capture_default_str();
  generate->add_option("--ell", gen_ell, "constraint count for random")->capture_default_str();
  generate->add_option("--p", gen_p, "edge probability for subgraph")->capture_default_str();
  generate->add_option("--seed", gen_seed, "seed")->capture_default_str();
  generate->add_option("--out", gen_out, "output path (stdout if omitted)");
  generate->callback([&] {
    iep::IEPInstance inst;
    if (gen_family == "sturm") {
      const auto e = parse_list(gen_eigs);
      inst = iep::gen_sturm_liouville(static_cast<int>(e.size()), e);
    } else if (gen_family == "toeplitz") {
      const iep::Spectrum s = parse_spectrum(gen_spectrum);
      inst = iep::gen_toeplitz(s.n(), s);
    } else if (gen_family == "random") {
      const iep::Spectrum s = parse_spectrum(gen_spectrum);
      inst = iep::gen_random(s.n(), s, gen_ell, gen_seed);
    } else if (gen_family == "subgraph") {
      inst = iep::gen_induced_subgraph(iep::erdos_renyi(gen_n, gen_p, gen_seed), iep::octahedral_graph());
    } else {
      throw iep::Error("unknown family '" + gen_family + "'");
    }
    emit(iep::instance_to_json(inst), gen_out);
  });

  std::string rid, rout = "out", ell_range = "8..15";
  int r_ell = 3, resolution = 21, r_n = 0, seeds = 10, reps = 20, r_trials = 100, r_jobs = 1;
  double r_p = 0.2, r_eps = 1e-7;
  std::uint64_t r_seed = 0;
  bool no_r2plus = false;
  auto* repro = app.add_subcommand("reproduce", "Rerun a scripted experiment");
  repro->add_option("id", rid,
                    "grid-s3, sturm5-int, sturm5-squares, toeplitz5, toeplitz8, octahedral or prop2")
      ->required();
  repro->add_option("--out", rout, "output directory")->capture_default_str();
  repro->add_option("--l,--ell", r_ell, "random constraints (grid-s3)")->capture_default_str();
  repro->add_option("--resolution", resolution, "grid points per axis (grid-s3)")->capture_default_str();
  repro->add_option("--n", r_n, "graph order (octahedral) or dimension (prop2)");
  repro->add_option("--p", r_p, "edge probability (octahedral)")->capture_default_str();
  repro->add_option("--seeds", seeds, "graph count (octahedral)")->capture_default_str();
  repro->add_option("--ell-range", ell_range, "LO..HI (prop2)")->capture_default_str();
  repro->add_option("--reps", reps, "repetitions per ell (prop2)")->capture_default_str();
  repro->add_option("--trials", r_trials, "rounding trials per level")->capture_default_str();
  repro->add_option("--seed", r_seed, "base seed")->capture_default_str();
  repro->add_option("--eps", r_eps, "solver tolerance")->capture_default_str();
  repro->add_option("--jobs", r_jobs, "worker threads")->capture_default_str();
  repro->add_flag("--no-r2plus", no_r2plus, "octahedral: stop after R1");
  repro->callback([&] {
    iep::ExperimentOptions eo;
    eo.solver.eps = r_eps;
    eo.jobs = r_jobs;
    const fs::path dir(rout);
    if (rid == "grid-s3") {
      const auto grid = iep::run_grid_s3(r_ell, r_seed, resolution, eo);
      write_file(dir, "grid.csv", iep::grid_to_csv(grid));
      write_file(dir, "instance.json", iep::instance_to_json(iep::grid_s3_base(r_ell, r_seed)));
      std::map<std::string, int> counts;
      for (const auto& p : grid) ++counts[iep::grid_class(p)];
      for (const auto& [cls, k] : counts) std::cout << cls << ": " << k << '\n';
    } else if (rid == "sturm5-int" || rid == "sturm5-squares" || rid == "toeplitz5" || rid == "toeplitz8") {
      const iep::IEPInstance inst = iep::pipeline_instance(rid);
      const auto res = iep::run_pipeline(rid, inst, {iep::Level::R1, iep::Level::R2, iep::Level::R2Plus},
                                         r_trials, r_seed, eo);
      write_file(dir, "instance.json", iep::instance_to_json(inst));
      write_file(dir, "summary.json", iep::pipeline_summary_json(res));
      if (res.cert1.cert) write_file(dir, "cert1.json", iep::cert1_to_json(*res.cert1.cert, res.cert1.check));
      std::cout << "cert1: " << iep::to_string(res.cert1.verdict) << '\n';
      for (const auto& lv : res.levels) {
        const std::string name = iep::to_string(lv.level);
        std::cout << name << ": "
                  << (lv.feasibility ? iep::to_string(lv.feasibility->verdict) : std::string("not-run"));
        if (lv.rounding) {
          std::cout << ", accepted " << lv.rounding->successes << " / " << lv.rounding->trials;
          write_file(dir, "rounding_" + name + ".json", iep::report_to_json(*lv.rounding));
          write_file(dir, "rounding_" + name + ".csv", iep::report_to_csv(*lv.rounding));
        }
        if (!lv.note.empty()) std::cout << " (" << lv.note << ")";
        std::cout << '\n';
      }
    } else if (rid == "octahedral") {
      const auto rows = iep::run_octahedral(r_n > 0 ? r_n : 20, r_p, seeds, r_seed, !no_r2plus, eo);
      write_file(dir, "octahedral.csv", iep::octahedral_to_csv(rows));
      for (const auto& r : rows) {
        std::cout << "seed " << r.seed << " edges " << r.edges << ": " << r.certified_at() << '\n';
        if (r.cert1.cert)
          write_file(dir, "cert1_seed" + std::to_string(r.seed) + ".json",
                     iep::cert1_to_json(*r.cert1.cert, r.cert1.check));
      }
    } else if (rid == "prop2") {
      const auto [lo, hi] = parse_range(ell_range);
      const auto rows = iep::run_prop2(r_n > 0 ? r_n : 5, lo, hi, reps, r_seed, eo);
      write_file(dir, "prop2.csv", iep::prop2_to_csv(rows));
      for (const auto& r : rows) std::cout << "ell " << r.ell << ": " << r.unique << " / " << r.reps << '\n';
    } else {
      throw iep::Error("unknown experiment '" + rid + "'");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const iep::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return code;
}
