// Shared fixtures and independent oracles for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "discl/energy.hpp"
#include "discl/experiments.hpp"
#include "discl/lattice.hpp"

namespace discl::testing {

/// Admissible configuration: det-1 linear map plus a uniform perturbation of the free unknowns.
inline Configuration random_admissible(const Problem& pb, std::mt19937_64& rng, double amplitude) {
  const double phi = pb.spec.phi;
  Configuration base = linear_init(pb.graph, phi, std::sin(phi) > 0.0 ? LinearMode::Det1 : LinearMode::EdgePreserving);
  Eigen::VectorXd x = pb.reduce(base);
  std::uniform_real_distribution<double> d(-amplitude, amplitude);
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] += d(rng) * pb.graph.eps;
  return pb.expand(x);
}

/// Central differences of the reduced energy.
inline Eigen::VectorXd fd_gradient(const Problem& pb, const MaterialLaw& law, const Eigen::VectorXd& x,
                                   double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (assemble_energy(pb, pb.expand(xp), law) - assemble_energy(pb, pb.expand(xm), law)) / (2.0 * h);
  }
  return g;
}

/// Central differences of the reduced gradient, column by column.
inline Eigen::MatrixXd fd_hessian(const Problem& pb, const MaterialLaw& law, const Eigen::VectorXd& x,
                                  double h) {
  Eigen::MatrixXd hess(x.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    hess.col(k) = (assemble_gradient(pb, pb.expand(xp), law) - assemble_gradient(pb, pb.expand(xm), law)) / (2.0 * h);
  }
  return hess;
}

/// Hand-written six-bond density using |A e| on the bonds ±e1, ±f, ±(f - e1).
inline double w_by_hand(const Mat2& a, double p) {
  const double c = 0.5, s = std::sqrt(3.0) / 2.0;
  const Vec2 bonds[3] = {Vec2(1.0, 0.0), Vec2(c, s), Vec2(c - 1.0, s)};
  double w = 0.0;
  for (const auto& e : bonds) w += 2.0 * std::pow(std::abs((a * e).norm() - 1.0), p) / p;
  return w;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace discl::testing
