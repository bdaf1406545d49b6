// Newton's method on the reduced lattice energy, with (H + tau I) regularization
// and Armijo backtracking.
#pragma once

#include <ostream>
#include <stdexcept>
#include <vector>

#include "discl/energy.hpp"
#include "discl/lattice.hpp"

namespace discl {

struct NewtonOptions {
  double grad_tol = 1e-10;  // on the reduced gradient, infinity norm
  int max_iter = 200;
  double tau0 = 0.0;
  double tau_growth = 10.0;
  // First nonzero shift, relative to the largest Hessian diagonal entry.
  double tau_floor_rel = 1e-12;
  double tau_max = 1e8;
  bool line_search = true;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 40;
  // Disable both regularization and line search; solve H s = -g with LDLT.
  bool plain = false;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double grad_inf = 0.0;
  double step_norm = 0.0;  // 0 on the final (converged) row
  double tau = 0.0;
  double alpha = 1.0;
};

struct SolveReport {
  std::vector<IterationRecord> history;
  int iterations = 0;  // Newton steps taken
  bool converged = false;
  double final_energy = 0.0;
  double final_grad_inf = 0.0;
  /// g_{k+1} / g_k^2 for consecutive records.
  std::vector<double> quadratic_ratio;

  /// Largest of the last `count` quadratic ratios, skipping steps whose new gradient
  /// is at or below `roundoff` (nothing left to measure there).
  double max_tail_ratio(std::size_t count = 3, double roundoff = 0.0) const;
};

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveResult {
  Configuration config;
  SolveReport report;
};

/// Minimize from `init`; slaves of `init` are recomputed from its masters.
/// Non-convergence within max_iter is reported (converged = false), not thrown.
SolveResult newton_minimize(const Problem& problem, const MaterialLaw& law,
                            const Configuration& init, const NewtonOptions& opts = {});

/// `iter,energy,grad_inf,step_norm,tau`
void write_solve_log(std::ostream& os, const SolveReport& report);

}  // namespace discl
