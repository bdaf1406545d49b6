#include "discl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/SparseCholesky>

namespace discl {

void NewtonOptions::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
  if (!(tau_growth > 1.0)) throw std::invalid_argument("tau_growth must exceed 1");
  if (tau0 < 0.0) throw std::invalid_argument("tau0 must be nonnegative");
}

double SolveReport::max_tail_ratio(std::size_t count, double roundoff) const {
  double m = 0.0;
  const std::size_t n = quadratic_ratio.size();
  for (std::size_t k = n > count ? n - count : 0; k < n; ++k) {
    if (history[k + 1].grad_inf <= roundoff) continue;
    m = std::max(m, quadratic_ratio[k]);
  }
  return m;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat shifted(const SpMat& h, double tau) {
  SpMat out = h;
  if (tau != 0.0) {
    for (Eigen::Index k = 0; k < out.rows(); ++k) out.coeffRef(k, k) += tau;
  }
  return out;
}

double max_abs_diagonal(const SpMat& h) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < h.rows(); ++k) m = std::max(m, std::abs(h.coeff(k, k)));
  return m;
}

double relative_residual(const SpMat& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a * x - b).norm() / nb : (a * x).norm();
}

// Solve (H + tau I) s = rhs; returns false if the factorization or residual fails.
template <typename Factorization>
bool try_solve(Factorization& fact, const SpMat& a, const Eigen::VectorXd& rhs, Eigen::VectorXd& s) {
  fact.factorize(a);
  if (fact.info() != Eigen::Success) return false;
  s = fact.solve(rhs);
  if (fact.info() != Eigen::Success || !s.allFinite()) return false;
  if (relative_residual(a, s, rhs) > 1e-10) {
    s += fact.solve(rhs - a * s);
    if (!s.allFinite() || relative_residual(a, s, rhs) > 1e-10) return false;
  }
  return true;
}

}  // namespace

SolveResult newton_minimize(const Problem& problem, const MaterialLaw& law,
                            const Configuration& init, const NewtonOptions& opts) {
  opts.validate();
  law.validate();
  const double scale = 1.0 + init.cwiseAbs().maxCoeff();
  if (problem.admissibility_defect(init) > 1e-9 * scale) {
    throw std::invalid_argument("initial configuration violates the wedge boundary condition");
  }

  Eigen::VectorXd x = problem.reduce(init);
  Configuration u = problem.expand(x);
  double energy = assemble_energy(problem, u, law);

  SolveReport report;
  Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  bool analyzed = false;

  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd g = assemble_gradient(problem, u, law);
    const double gnorm = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
    IterationRecord rec;
    rec.iter = iter;
    rec.energy = energy;
    rec.grad_inf = gnorm;
    rec.step_norm = 0.0;
    rec.tau = 0.0;

    if (gnorm <= opts.grad_tol) {
      report.converged = true;
      report.history.push_back(rec);
      break;
    }
    if (iter >= opts.max_iter) {
      report.history.push_back(rec);
      break;
    }

    const SpMat h = assemble_hessian(problem, u, law);
    if (!analyzed) {
      llt.analyzePattern(h);
      ldlt.analyzePattern(h);
      analyzed = true;
    }

    Eigen::VectorXd step;
    double tau = opts.plain ? 0.0 : opts.tau0;
    const double tau_floor = opts.tau_floor_rel * std::max(1.0, max_abs_diagonal(h));
    double alpha = 1.0;
    Eigen::VectorXd x_next;
    Configuration u_next;
    double energy_next = energy;
    bool accepted = false;

    while (!accepted) {
      bool ok;
      if (opts.plain) {
        ok = try_solve(ldlt, h, -g, step);
        if (!ok) throw SingularSystemError("Newton system could not be solved (plain Newton)");
      } else {
        ok = try_solve(llt, shifted(h, tau), -g, step) && g.dot(step) < 0.0;
      }

      if (ok) {
        alpha = 1.0;
        const double slope = g.dot(step);
        // Predicted decrease below what the energy can resolve: take the full step.
        const bool roundoff_regime =
            std::abs(slope) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(energy);
        for (int halving = 0;; ++halving) {
          x_next = x + alpha * step;
          u_next = problem.expand(x_next);
          bool finite = true;
          try {
            energy_next = assemble_energy(problem, u_next, law);
          } catch (const NonFiniteEnergyError&) {
            finite = false;
          }
          if (opts.plain || !opts.line_search) {
            if (!finite) throw NonFiniteEnergyError("energy not finite after Newton step");
            accepted = true;
            break;
          }
          if (finite && (energy_next <= energy + opts.armijo_c * alpha * slope ||
                         (roundoff_regime && halving == 0))) {
            accepted = true;
            break;
          }
          if (halving >= opts.max_halvings) break;
          alpha *= opts.backtrack;
        }
      }
      if (accepted) break;

      tau = tau == 0.0 ? tau_floor : tau * opts.tau_growth;
      if (tau > opts.tau_max) {
        std::ostringstream msg;
        msg << "no acceptable Newton step at iteration " << iter << " after shifting by tau > "
            << opts.tau_max;
        throw SingularSystemError(msg.str());
      }
    }

    rec.step_norm = alpha * step.norm();
    rec.tau = tau;
    rec.alpha = alpha;
    report.history.push_back(rec);
    x = std::move(x_next);
    u = std::move(u_next);
    energy = energy_next;
  }

  report.iterations = static_cast<int>(report.history.size()) - 1;
  report.final_energy = report.history.back().energy;
  report.final_grad_inf = report.history.back().grad_inf;
  for (std::size_t k = 1; k < report.history.size(); ++k) {
    const double prev = report.history[k - 1].grad_inf;
    report.quadratic_ratio.push_back(report.history[k].grad_inf / (prev * prev));
  }
  return {std::move(u), std::move(report)};
}

void write_solve_log(std::ostream& os, const SolveReport& report) {
  os << "iter,energy,grad_inf,step_norm,tau\n";
  os << std::setprecision(17);
  for (const auto& r : report.history) {
    os << r.iter << ',' << r.energy << ',' << r.grad_inf << ',' << r.step_norm << ',' << r.tau << '\n';
  }
}

}  // namespace discl
