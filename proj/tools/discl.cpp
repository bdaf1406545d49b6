// discl: wedge-disclination lattice energy minimization.
//
//   discl mesh       --eps-exp K                      lattice dump
//   discl minimize   --phi 5 --eps-exp K --init ...   minimizer, solve log, config dump
//   discl sweep      --phi 5 --eps-max-exp 8          refinement sweep CSV
//   discl fold-study --phi 5 --eps-exp 2              fold study CSV
//   discl verify     --all                            numerical checks
//   discl render     --config FILE | --init ...       SVG of a configuration

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "discl/analysis.hpp"
#include "discl/energy.hpp"
#include "discl/experiments.hpp"
#include "discl/io.hpp"
#include "discl/lattice.hpp"
#include "discl/run_config.hpp"
#include "discl/solver.hpp"

namespace fs = std::filesystem;
using namespace discl;

namespace {

struct CommonFlags {
  std::string phi = "5";
  int eps_exp = 3;
  double p = 2.0;
  std::string psi = "zero";
  std::string init = "linear:det1";
  std::string out = ".";
  bool plain = false;
  bool uniform_weights = false;
  double grad_tol = 1e-10;
  int max_iter = 200;
};

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--phi", f.phi, "5, 7, 2pi/<k>, pi/<k> or radians")->capture_default_str();
  cmd->add_option("--p", f.p, "bond exponent (>= 2)")->capture_default_str();
  cmd->add_option("--psi", f.psi, "zero | smoothed[:kappa[,delta]]")->capture_default_str();
  cmd->add_flag("--uniform-weights", f.uniform_weights, "count boundary bonds with full weight");
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_flag("--plain-newton", f.plain, "undamped Newton: no line search, no regularization");
  cmd->add_option("--grad-tol", f.grad_tol, "reduced gradient infinity-norm tolerance")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Newton iteration cap")->capture_default_str();
}

RunConfig make_config(const std::string& sub, const CommonFlags& f) {
  RunConfig cfg;
  cfg.subcommand = sub;
  cfg.phi_text = f.phi;
  cfg.phi = parse_phi(f.phi);
  cfg.eps_exp = f.eps_exp;
  cfg.law = parse_law(f.p, f.psi, f.uniform_weights);
  cfg.init = parse_init(f.init);
  cfg.newton.grad_tol = f.grad_tol;
  cfg.newton.max_iter = f.max_iter;
  cfg.newton.plain = f.plain;
  cfg.out_dir = f.out;
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

Configuration build_init(const Problem& pb, const RunConfig& cfg) {
  switch (cfg.init.kind) {
    case InitKind::LinearDet1:
      return linear_init(pb.graph, cfg.phi, LinearMode::Det1);
    case InitKind::LinearEdge:
      return linear_init(pb.graph, cfg.phi, LinearMode::EdgePreserving);
    case InitKind::Fold:
      return folded_init(pb, cfg.init.folds);
    case InitKind::File: {
      const ConfigFile file = load_configuration(cfg.init.file);
      if (file.config.cols() != static_cast<Eigen::Index>(pb.graph.num_vertices())) {
        throw IoError(cfg.init.file.string() + ": vertex count does not match eps = 2^-" +
                      std::to_string(cfg.eps_exp));
      }
      return pb.expand(pb.reduce(file.config));
    }
  }
  throw ConfigError("unknown init kind");
}

ConfigHeader header_for(const RunConfig& cfg) {
  return {cfg.phi, 1 << cfg.eps_exp, cfg.law.p, cfg.law.psi_name()};
}

int cmd_mesh(const CommonFlags& f) {
  const RunConfig cfg = make_config("mesh", f);
  const Problem pb(LatticeSpec{cfg.phi, 1 << cfg.eps_exp});
  const fs::path path = prepare_out(cfg.out_dir) / ("mesh_eps" + std::to_string(cfg.eps_exp) + ".txt");
  auto out = open_out(path);
  write_lattice(out, pb.graph, pb.cmap);
  std::cout << "wrote " << path.string() << " (" << pb.graph.num_vertices() << " vertices, "
            << pb.graph.num_edges() << " edges, " << pb.graph.num_triangles() << " triangles)\n";
  return 0;
}

int cmd_minimize(const CommonFlags& f) {
  const RunConfig cfg = make_config("minimize", f);
  const Problem pb(LatticeSpec{cfg.phi, 1 << cfg.eps_exp});
  const SolveResult res = newton_minimize(pb, cfg.law, build_init(pb, cfg), cfg.newton);
  const fs::path dir = prepare_out(cfg.out_dir);
  const std::string k = std::to_string(cfg.eps_exp);
  save_configuration(dir / ("config_eps" + k + ".txt"), res.config, header_for(cfg));
  auto log = open_out(dir / ("solve_eps" + k + ".csv"));
  write_solve_log(log, res.report);
  const DetStats dets = triangle_dets(pb.graph, res.config);
  std::printf("energy=%.17g iterations=%d grad_inf=%.3g min_det=%.6g nonpos_det=%ld converged=%s\n",
              res.report.final_energy, res.report.iterations, res.report.final_grad_inf, dets.min,
              dets.nonpositive, res.report.converged ? "yes" : "no");
  return res.report.converged ? 0 : 1;
}

int cmd_sweep(const CommonFlags& f, int k_max, bool allow_large, bool cold) {
  const RunConfig cfg = make_config("sweep", f);
  SweepOptions opts;
  opts.k_max = k_max;
  opts.allow_large = allow_large;
  opts.cold_start = cold;
  opts.keep_configs = false;
  const SweepRecord rec = run_sweep(cfg.phi, cfg.law, cfg.newton, opts);
  const fs::path path = prepare_out(cfg.out_dir) / ("sweep_phi" + phi_tag(cfg.phi_text) + ".csv");
  auto out = open_out(path);
  write_sweep_csv(out, rec);
  write_sweep_csv(std::cout, rec);
  bool ok = true;
  for (const auto& l : rec.levels) ok = ok && l.converged;
  return ok ? 0 : 1;
}

int cmd_fold_study(const CommonFlags& f, int max_folds) {
  const RunConfig cfg = make_config("fold-study", f);
  if (max_folds < 0 || max_folds > (1 << cfg.eps_exp) - 1) throw ConfigError("fold count out of range for this eps");
  const FoldStudy study = run_fold_study(cfg.phi, cfg.eps_exp, max_folds, cfg.law, cfg.newton);
  const fs::path path = prepare_out(cfg.out_dir) / ("fold_phi" + phi_tag(cfg.phi_text) + ".csv");
  auto out = open_out(path);
  write_fold_csv(out, study);
  write_fold_csv(std::cout, study);
  bool ok = true;
  for (const auto& r : study.runs) ok = ok && r.converged;
  return ok ? 0 : 1;
}

struct VerifyFlags {
  bool all = false;
  bool six_bond = false;
  bool laminate = false;
  bool dist = false;
  bool rigidity = false;
  bool frustration = false;
  long samples = 100000;
  std::uint64_t seed = 0;
  int frustration_k = 5;
};

int cmd_verify(const CommonFlags& f, const VerifyFlags& v) {
  const RunConfig cfg = make_config("verify", f);
  const bool none = !(v.six_bond || v.laminate || v.dist || v.rigidity || v.frustration);
  const bool all = v.all || none;
  std::vector<CheckReport> reports;
  if (all || v.six_bond) reports.push_back(check_six_bond(v.samples, v.seed));
  if (all || v.laminate) reports.push_back(check_laminate());
  if (all || v.dist) reports.push_back(check_dist_so2(1000, 1000000, v.seed));
  if (all || v.rigidity) {
    const MaterialLaw law = cfg.law.psi == PsiKind::Zero ? MaterialLaw::smoothed_abs(cfg.law.p) : cfg.law;
    reports.push_back(check_rigidity(law, 10000, v.seed));
  }
  if (all || v.frustration) {
    std::vector<SweepRecord> sweeps;
    SweepOptions opts;
    opts.k_max = v.frustration_k;
    opts.keep_configs = false;
    for (double phi : {2.0 * kPi / 5.0, 2.0 * kPi / 7.0}) {
      sweeps.push_back(run_sweep(phi, MaterialLaw::zero_psi(cfg.law.p), cfg.newton, opts));
    }
    reports.push_back(frustration_check(sweeps, 1e-4));
  }
  const fs::path path = prepare_out(cfg.out_dir) / "verify.jsonl";
  auto out = open_out(path);
  write_report_jsonl(out, reports);
  write_report_text(std::cout, reports);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  return ok ? 0 : 1;
}

int cmd_render(const CommonFlags& f, const std::string& config_path, bool copies) {
  RunConfig cfg = make_config("render", f);
  Configuration u;
  if (!config_path.empty()) {
    const ConfigFile file = load_configuration(config_path);
    int n = file.header.n;
    if (n < 1) throw IoError(config_path + ": header lacks n");
    cfg.eps_exp = 0;
    while ((1 << cfg.eps_exp) < n) ++cfg.eps_exp;
    cfg.phi = file.header.phi;
    const Problem pb(LatticeSpec{cfg.phi, n});
    if (file.config.cols() != static_cast<Eigen::Index>(pb.graph.num_vertices())) {
      throw IoError(config_path + ": vertex count does not match n in header");
    }
    u = file.config;
    const fs::path path = prepare_out(cfg.out_dir) / ("render_eps" + std::to_string(cfg.eps_exp) + ".svg");
    auto out = open_out(path);
    render_svg(out, pb.graph, u, cfg.phi, {copies});
    std::cout << "wrote " << path.string() << '\n';
    return 0;
  }
  const Problem pb(LatticeSpec{cfg.phi, 1 << cfg.eps_exp});
  const SolveResult res = newton_minimize(pb, cfg.law, build_init(pb, cfg), cfg.newton);
  const fs::path path = prepare_out(cfg.out_dir) / ("render_eps" + std::to_string(cfg.eps_exp) + ".svg");
  auto out = open_out(path);
  render_svg(out, pb.graph, res.config, cfg.phi, {copies});
  std::cout << "wrote " << path.string() << '\n';
  return res.report.converged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wedge-disclination lattice energy: minimization, sweeps and checks"};
  app.require_subcommand(1);
  CommonFlags flags;
  VerifyFlags vflags;
  int k_max = 8;
  bool allow_large = false;
  bool cold = false;
  int max_folds = 3;
  std::string config_path;
  bool copies = false;

  auto* mesh = app.add_subcommand("mesh", "write the reference lattice dump");
  mesh->add_option("--eps-exp", flags.eps_exp, "eps = 2^-k")->capture_default_str();
  add_model_flags(mesh, flags);

  auto* minimize = app.add_subcommand("minimize", "minimize from one initial condition");
  minimize->add_option("--eps-exp", flags.eps_exp, "eps = 2^-k")->capture_default_str();
  minimize->add_option("--init", flags.init, "linear:det1 | linear:edge | fold:<L> | file:<path>")
      ->capture_default_str();
  add_model_flags(minimize, flags);
  add_solver_flags(minimize, flags);

  auto* sweep = app.add_subcommand("sweep", "refinement sweep eps = 2^-1 .. 2^-k with warm starts");
  sweep->add_option("--eps-max-exp", k_max, "finest level k")->capture_default_str();
  sweep->add_flag("--allow-large", allow_large, "permit k > 8");
  sweep->add_flag("--cold-start", cold, "start every level from the det-1 linear map");
  add_model_flags(sweep, flags);
  add_solver_flags(sweep, flags);

  auto* fold = app.add_subcommand("fold-study", "minimize from folded references, L = 0..max");
  fold->add_option("--eps-exp", flags.eps_exp, "eps = 2^-k")->capture_default_str();
  fold->add_option("--folds", max_folds, "largest fold count")->capture_default_str();
  add_model_flags(fold, flags);
  add_solver_flags(fold, flags);

  auto* verify = app.add_subcommand("verify", "numerical checks of the density and minimizers");
  verify->add_flag("--all", vflags.all, "run every check (default)");
  verify->add_flag("--six-bond", vflags.six_bond, "six-bond inequality");
  verify->add_flag("--laminate", vflags.laminate, "rank-one laminate at 0");
  verify->add_flag("--dist", vflags.dist, "distance to SO(2) closed form vs brute force");
  verify->add_flag("--rigidity", vflags.rigidity, "W >= c dist^p sampled");
  verify->add_flag("--frustration", vflags.frustration, "positive minimizer energies");
  verify->add_option("--samples", vflags.samples, "samples for the six-bond inequality")->capture_default_str();
  verify->add_option("--seed", vflags.seed, "random seed")->capture_default_str();
  verify->add_option("--frustration-levels", vflags.frustration_k, "sweep depth for the frustration check")
      ->capture_default_str();
  add_model_flags(verify, flags);

  auto* render = app.add_subcommand("render", "SVG of a configuration");
  render->add_option("--config", config_path, "configuration file (else minimize first)");
  render->add_flag("--copies", copies, "composite all rotated copies R_phi^k u");
  render->add_option("--eps-exp", flags.eps_exp, "eps = 2^-k")->capture_default_str();
  render->add_option("--init", flags.init, "initial condition when no --config is given")->capture_default_str();
  add_model_flags(render, flags);
  add_solver_flags(render, flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mesh) return cmd_mesh(flags);
    if (*minimize) return cmd_minimize(flags);
    if (*sweep) return cmd_sweep(flags, k_max, allow_large, cold);
    if (*fold) return cmd_fold_study(flags, max_folds);
    if (*verify) return cmd_verify(flags, vflags);
    if (*render) return cmd_render(flags, config_path, copies);
  } catch (const ConfigError& e) {
    std::cerr << "discl: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "discl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
