// mpfe: run scenarios, sample field dumps along lines, check kernels.
#include "mpfe/errors.hpp"
#include "mpfe/scenario.hpp"
#include "mpfe/sim.hpp"
#include "mpfe/verify.hpp"
#include "mpfe/vtk.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kValidation = 2, kSolver = 3, kInstability = 4;

std::array<double, 3> parse_point(const std::string& s) {
  std::array<double, 3> p{0.0, 0.0, 0.0};
  std::stringstream ss(s);
  std::string tok;
  int k = 0;
  while (std::getline(ss, tok, ',')) {
    if (k == 3) throw mpfe::ValidationError("point '" + s + "' has more than three coordinates");
    try {
      p[k++] = std::stod(tok);
    } catch (const std::exception&) {
      throw mpfe::ValidationError("point '" + s + "' is not a comma-separated coordinate list");
    }
  }
  if (k < 2) throw mpfe::ValidationError("point '" + s + "' needs at least two coordinates");
  return p;
}

struct RunArgs {
  std::string file, builtin, model, output_dir;
  int steps = -1, threads = 0;
  long long seed = -1;
  bool no_averaging = false, verbose = false, dry_run = false;
};

int cmd_run(const RunArgs& a) {
  if (a.file.empty() == a.builtin.empty()) throw mpfe::ValidationError("give either a scenario file or --builtin");
  mpfe::Scenario s = a.builtin.empty() ? mpfe::load_scenario(a.file) : mpfe::builtin_scenario(a.builtin);
  if (!a.model.empty()) s.model = a.model;
  if (a.steps >= 0) s.steps = a.steps;
  if (a.seed >= 0) s.seed = static_cast<std::uint64_t>(a.seed);
  if (a.no_averaging) s.kinetics.averaging = false;
  mpfe::validate(s);
  if (a.dry_run) {
    std::cout << mpfe::scenario_to_json(s).dump(2) << '\n';
    return 0;
  }
  mpfe::RunOptions opt;
  opt.output_dir = a.output_dir.empty() ? "runs/" + s.name + "_" + s.model : a.output_dir;
  opt.threads = a.threads;
  opt.log = &std::cerr;
  opt.verbose = a.verbose;
  const auto res = mpfe::run(s, opt);
  const auto& last = res.ledger.back();
  std::cout << "finished " << s.name << " (" << s.model << "), " << res.steps << " steps, psi_elastic "
            << last.psi_elastic << " J/m^3; outputs in " << opt.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-phase-field elasticity with pairwise rank-one relaxation"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "run a scenario file or a builtin scenario");
  run->add_option("scenario", ra.file, "scenario JSON file");
  run->add_option("--builtin", ra.builtin, "builtin scenario name (see list-builtins)");
  run->add_option("--model", ra.model, "voigt | reuss | model_a | model_b | model_a_dual_only");
  run->add_option("--steps", ra.steps, "number of phase-field steps");
  run->add_option("--seed", ra.seed, "seed for random variant selection");
  run->add_option("--output-dir", ra.output_dir, "output directory (default runs/<scenario>_<model>)");
  run->add_option("--threads", ra.threads, "worker threads (default: MPFE_THREADS or all cores)");
  run->add_flag("--no-averaging", ra.no_averaging, "disable driving-force averaging");
  run->add_flag("--verbose", ra.verbose, "log every equilibrium iteration");
  run->add_flag("--dry-run", ra.dry_run, "print the resolved scenario and exit");

  std::string dump_path, out_path;
  std::vector<std::string> points, fields;
  auto* probe = app.add_subcommand("probe", "sample a VTK dump along a polyline");
  probe->add_option("dump", dump_path, "VTK file written by run")->required();
  probe->add_option("--point", points, "polyline vertex in cell coordinates, x,y[,z]; repeat")->required();
  probe->add_option("--field", fields, "array to sample; repeat (default: all)");
  probe->add_option("--output", out_path, "CSV path (default: stdout)");

  std::string suite;
  int instances = 50;
  long long vseed = 1;
  auto* verify = app.add_subcommand("verify", "run kernel property suites");
  verify->add_option("suite", suite, "suite name: kernels")->required();
  verify->add_option("--instances", instances, "random instances per property")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vseed, "seed");

  auto* list = app.add_subcommand("list-builtins", "list builtin scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  try {
    if (*run) return cmd_run(ra);
    if (*probe) {
      const auto dump = mpfe::read_vtk(dump_path);
      std::vector<std::array<double, 3>> pts;
      for (const auto& p : points) pts.push_back(parse_point(p));
      if (out_path.empty()) {
        mpfe::write_probe_csv(dump, pts, fields, std::cout);
      } else {
        std::ofstream f(out_path);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        mpfe::write_probe_csv(dump, pts, fields, f);
      }
      return 0;
    }
    if (*verify) {
      if (suite != "kernels") throw mpfe::ValidationError("unknown verify suite '" + suite + "' (expected kernels)");
      const auto res = mpfe::verify_kernels(instances, static_cast<std::uint64_t>(vseed));
      mpfe::print_report(res, std::cout);
      for (const auto& r : res)
        if (!r.passed) return 1;
      return 0;
    }
    if (*list) {
      for (const auto& n : mpfe::builtin_names()) std::cout << n << '\n';
      return 0;
    }
  } catch (const mpfe::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const mpfe::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const mpfe::InstabilityError& e) {
    std::cerr << "instability: " << e.what() << '\n';
    return kInstability;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
