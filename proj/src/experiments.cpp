#include "discl/experiments.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "discl/analysis.hpp"

namespace discl {

Mat2 admissible_linear_map(double phi, LinearMode mode) {
  double s = 1.0;
  if (mode == LinearMode::Det1) {
    const double sphi = std::sin(phi);
    if (!(sphi > 0.0)) throw std::invalid_argument("det-1 linear map needs phi in (0, pi)");
    s = std::sqrt(std::sin(kPi / 3.0) / sphi);
  }
  const Vec2 v(s, 0.0);
  Mat2 images;
  images.col(0) = v;
  images.col(1) = rotation(phi) * v;
  Mat2 basis;
  basis.col(0) = Vec2(1.0, 0.0);
  basis.col(1) = rotation(kPi / 3.0) * Vec2(1.0, 0.0);
  return images * basis.inverse();
}

Configuration linear_init(const LatticeGraph& graph, double phi, LinearMode mode) {
  return admissible_linear_map(phi, mode) * graph.reference;
}

FoldPlan make_fold_plan(const LatticeGraph& graph, int folds) {
  if (folds < 0 || folds > graph.n - 1) {
    std::ostringstream msg;
    msg << "fold count " << folds << " out of range [0, " << graph.n - 1 << "]";
    throw std::invalid_argument(msg.str());
  }
  FoldPlan plan;
  for (int l = 1; l <= folds; ++l) {
    const int m = graph.n - l;
    plan.lines.push_back({m, lattice_point(graph.eps, m, 0), Vec2(std::sqrt(3.0) / 2.0, 0.5)});
  }
  return plan;
}

std::vector<std::array<int, 2>> fold_lattice_coords(const LatticeGraph& graph, int folds) {
  const FoldPlan plan = make_fold_plan(graph, folds);
  auto coords = graph.ij;
  for (const auto& line : plan.lines) {
    const int m = line.level;
    for (auto& c : coords) {
      auto& [i, j] = c;
      // the flap left outside the left edge by the previous fold goes back in first
      if (i < 0) {
        j += i;
        i = -i;
      }
      if (i > m) {
        j += i - m;
        i = 2 * m - i;
      } else if (i + j > m) {
        const int t = i + j - m;
        i -= t;
        j -= t;
      }
    }
  }
  return coords;
}

Configuration fold_reference(const LatticeGraph& graph, int folds) {
  const auto coords = fold_lattice_coords(graph, folds);
  Configuration x(2, static_cast<Eigen::Index>(coords.size()));
  for (std::size_t v = 0; v < coords.size(); ++v) {
    x.col(static_cast<Eigen::Index>(v)) = lattice_point(graph.eps, coords[v][0], coords[v][1]);
  }
  return x;
}

Configuration folded_init(const Problem& problem, int folds) {
  const Mat2 a = admissible_linear_map(problem.spec.phi, LinearMode::EdgePreserving);
  const Configuration mapped = a * fold_reference(problem.graph, folds);
  return problem.expand(problem.reduce(mapped));
}

Configuration prolong(const LatticeGraph& coarse, const Configuration& coarse_config,
                      const LatticeGraph& fine) {
  if (fine.n != 2 * coarse.n) throw LatticeError("fine lattice is not the halving refinement of the coarse one");
  if (coarse_config.cols() != static_cast<Eigen::Index>(coarse.num_vertices())) {
    throw LatticeError("coarse configuration does not match the coarse lattice");
  }
  Configuration out(2, static_cast<Eigen::Index>(fine.num_vertices()));
  auto at = [&](int i, int j) { return coarse_config.col(coarse.id(i, j)); };
  for (std::size_t v = 0; v < fine.num_vertices(); ++v) {
    const auto [i, j] = fine.ij[v];
    const auto col = static_cast<Eigen::Index>(v);
    const bool odd_i = i % 2 != 0;
    const bool odd_j = j % 2 != 0;
    if (!odd_i && !odd_j) {
      out.col(col) = at(i / 2, j / 2);
    } else if (odd_i && !odd_j) {
      out.col(col) = 0.5 * (at((i - 1) / 2, j / 2) + at((i + 1) / 2, j / 2));
    } else if (!odd_i && odd_j) {
      out.col(col) = 0.5 * (at(i / 2, (j - 1) / 2) + at(i / 2, (j + 1) / 2));
    } else {
      out.col(col) = 0.5 * (at((i - 1) / 2, (j + 1) / 2) + at((i + 1) / 2, (j - 1) / 2));
    }
  }
  return out;
}

std::optional<double> estimate_rate(double e_eps, double e_2eps, double e_4eps) {
  const double den = e_2eps - e_eps;
  if (den == 0.0) return std::nullopt;
  const double ratio = (e_4eps - e_2eps) / den;
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
  return std::log2(ratio);
}

SweepRecord run_sweep(double phi, const MaterialLaw& law, const NewtonOptions& newton,
                      const SweepOptions& opts) {
  if (opts.k_max < 1) throw std::invalid_argument("sweep needs k_max >= 1");
  if (opts.k_max > 8 && !opts.allow_large) {
    throw std::invalid_argument("k_max > 8 needs an explicit override");
  }
  SweepRecord record;
  record.phi = phi;
  std::optional<Problem> previous;
  Configuration previous_config;
  for (int k = 1; k <= opts.k_max; ++k) {
    Problem problem(LatticeSpec{phi, 1 << k});
    Configuration init = (k == 1 || opts.cold_start)
                             ? linear_init(problem.graph, phi, LinearMode::Det1)
                             : problem.expand(problem.reduce(
                                   prolong(previous->graph, previous_config, problem.graph)));
    SolveResult result;
    try {
      result = newton_minimize(problem, law, init, newton);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sweep failed at eps = 2^-" << k << ": " << e.what();
      throw SweepError(k, msg.str());
    }
    const DetStats dets = triangle_dets(problem.graph, result.config);
    SweepLevel level;
    level.eps_exp = k;
    level.energy = result.report.final_energy;
    level.min_det = dets.min;
    level.nonpos_det_count = dets.nonpositive;
    level.iterations = result.report.iterations;
    level.converged = result.report.converged;
    level.report = std::move(result.report);
    const auto& lv = record.levels;
    if (lv.size() >= 2) {
      level.p_eps = estimate_rate(level.energy, lv[lv.size() - 1].energy, lv[lv.size() - 2].energy);
    }
    previous_config = result.config;
    if (opts.keep_configs) level.config = std::move(result.config);
    record.levels.push_back(std::move(level));
    previous.emplace(std::move(problem));
  }
  return record;
}

FoldStudy run_fold_study(double phi, int eps_exp, int max_folds, const MaterialLaw& law,
                         const NewtonOptions& newton) {
  FoldStudy study;
  study.phi = phi;
  study.eps_exp = eps_exp;
  const Problem problem(LatticeSpec{phi, 1 << eps_exp});
  for (int l = 0; l <= max_folds; ++l) {
    SolveResult result = newton_minimize(problem, law, folded_init(problem, l), newton);
    const DetStats dets = triangle_dets(problem.graph, result.config);
    FoldRun run;
    run.folds = l;
    run.energy = result.report.final_energy;
    run.min_det = dets.min;
    run.nonpos_det_count = dets.nonpositive;
    run.converged = result.report.converged;
    run.report = std::move(result.report);
    run.config = std::move(result.config);
    study.runs.push_back(std::move(run));
  }
  return study;
}

void write_sweep_csv(std::ostream& os, const SweepRecord& sweep) {
  os << "phi,eps_exp,energy,p_eps,min_det,nonpos_det_count,iters,converged\n";
  os << std::setprecision(17);
  for (const auto& l : sweep.levels) {
    os << sweep.phi << ',' << l.eps_exp << ',' << l.energy << ',';
    if (l.p_eps) os << *l.p_eps;
    os << ',' << l.min_det << ',' << l.nonpos_det_count << ',' << l.iterations << ','
       << (l.converged ? 1 : 0) << '\n';
  }
}

void write_fold_csv(std::ostream& os, const FoldStudy& study) {
  os << "phi,folds,energy,min_det,nonpos_det_count\n";
  os << std::setprecision(17);
  for (const auto& r : study.runs) {
    os << study.phi << ',' << r.folds << ',' << r.energy << ',' << r.min_det << ','
       << r.nonpos_det_count << '\n';
  }
}

}  // namespace discl
