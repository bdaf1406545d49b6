// Initial conditions (admissible linear maps, folded references, prolongation)
// and the refinement sweep / fold study drivers.
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "discl/energy.hpp"
#include "discl/lattice.hpp"
#include "discl/solver.hpp"

namespace discl {

enum class LinearMode { Det1, EdgePreserving };

/// A with A e1 = v and A R_{pi/3} e1 = R_phi v. Det1: v = s e1 with det A = 1;
/// EdgePreserving: v = e1.
Mat2 admissible_linear_map(double phi, LinearMode mode);

/// u(x) = A x at every vertex.
Configuration linear_init(const LatticeGraph& graph, double phi, LinearMode mode);

/// One reflection line: chord i + j = m in lattice coordinates.
struct FoldLine {
  int level = 0;  // m
  Vec2 point;     // Cartesian point on the line (on the bottom edge)
  Vec2 normal;    // unit, pointing away from the origin
};

struct FoldPlan {
  std::vector<FoldLine> lines;
};

FoldPlan make_fold_plan(const LatticeGraph& graph, int folds);

/// Folded reference positions as (possibly negative) integer lattice
/// coordinates. Fold l with m = n - l acts on the current positions as follows:
/// a point with i < 0 is first reflected back across the left edge, (i, j) -> (-i, i + j);
/// then a point with i > m is reflected across the line through (m, 0) along the left
/// edge direction, (i, j) -> (2m - i, j + i - m), and any other point with i + j > m is
/// reflected across the chord, (i, j) -> (i - t, j - t), t = i + j - m.
/// The result satisfies folded(0, k) = R60 folded(k, 0) on the lattice.
std::vector<std::array<int, 2>> fold_lattice_coords(const LatticeGraph& graph, int folds);

/// Cartesian folded reference positions, 2 x |V|.
Configuration fold_reference(const LatticeGraph& graph, int folds);

/// A * folded(x) on free vertices; slaves follow from the wedge condition.
Configuration folded_init(const Problem& problem, int folds);

/// Piecewise-linear interpolation of a coarse configuration onto the halved lattice.
Configuration prolong(const LatticeGraph& coarse, const Configuration& coarse_config,
                      const LatticeGraph& fine);

/// log2((e_4eps - e_2eps) / (e_2eps - e_eps)); nullopt if the ratio is not positive.
std::optional<double> estimate_rate(double e_eps, double e_2eps, double e_4eps);

struct SweepLevel {
  int eps_exp = 0;  // eps = 2^-eps_exp
  double energy = 0.0;
  std::optional<double> p_eps;
  double min_det = 0.0;
  long nonpos_det_count = 0;
  int iterations = 0;
  bool converged = false;
  SolveReport report;
  Configuration config;
};

struct SweepRecord {
  double phi = 0.0;
  std::vector<SweepLevel> levels;
};

struct SweepOptions {
  int k_max = 8;
  bool allow_large = false;  // permit k_max > 8
  bool cold_start = false;   // start every level from the linear map
  bool keep_configs = true;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(int eps_exp, const std::string& what)
      : std::runtime_error(what), eps_exp_(eps_exp) {}
  int eps_exp() const { return eps_exp_; }

 private:
  int eps_exp_;
};

SweepRecord run_sweep(double phi, const MaterialLaw& law, const NewtonOptions& newton,
                      const SweepOptions& opts = {});

struct FoldRun {
  int folds = 0;
  double energy = 0.0;
  double min_det = 0.0;
  long nonpos_det_count = 0;
  bool converged = false;
  SolveReport report;
  Configuration config;
};

struct FoldStudy {
  double phi = 0.0;
  int eps_exp = 2;
  std::vector<FoldRun> runs;
};

FoldStudy run_fold_study(double phi, int eps_exp, int max_folds, const MaterialLaw& law,
                         const NewtonOptions& newton);

/// `phi,eps_exp,energy,p_eps,min_det,nonpos_det_count,iters,converged`
void write_sweep_csv(std::ostream& os, const SweepRecord& sweep);
/// `phi,folds,energy,min_det,nonpos_det_count`
void write_fold_csv(std::ostream& os, const FoldStudy& study);

}  // namespace discl
