#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "discl/analysis.hpp"
#include "discl/experiments.hpp"
#include "discl/solver.hpp"
#include "support.hpp"

using namespace discl;

TEST_CASE("coarsest level from the det-1 map") {
  for (double phi : {2.0 * kPi / 5.0, 2.0 * kPi / 7.0}) {
    const Problem pb(LatticeSpec{phi, 2});
    const MaterialLaw law = MaterialLaw::zero_psi();
    const SolveResult res = newton_minimize(pb, law, linear_init(pb.graph, phi, LinearMode::Det1));
    CHECK(res.report.converged);
    CHECK(res.report.final_grad_inf <= 1e-10);
    CHECK(triangle_dets(pb.graph, res.config).min > 0.0);
    CHECK(pb.admissibility_defect(res.config) == 0.0);
    CHECK(res.report.final_energy > 1e-4);
  }
}

TEST_CASE("descent, stationarity and fixed point") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 8});
  const MaterialLaw law = MaterialLaw::zero_psi();
  std::mt19937_64 rng(31);
  const Configuration init = testing::random_admissible(pb, rng, 0.1);
  const SolveResult res = newton_minimize(pb, law, init);
  REQUIRE(res.report.converged);
  const auto& h = res.report.history;
  for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k].energy <= h[k - 1].energy);
  CHECK(assemble_gradient(pb, res.config, law).cwiseAbs().maxCoeff() <= 1e-10);

  const SolveResult again = newton_minimize(pb, law, res.config);
  CHECK(again.report.converged);
  CHECK(again.report.iterations <= 1);
  CHECK(again.report.final_energy == doctest::Approx(res.report.final_energy).epsilon(1e-12));
}

TEST_CASE("quadratic tail") {
  const Problem pb(LatticeSpec{2.0 * kPi / 7.0, 4});
  const SolveResult res =
      newton_minimize(pb, MaterialLaw::zero_psi(), linear_init(pb.graph, pb.spec.phi, LinearMode::Det1));
  REQUIRE(res.report.converged);
  REQUIRE(res.report.quadratic_ratio.size() + 1 == res.report.history.size());
  CHECK(res.report.max_tail_ratio(3, 1e-13) < 1e3);
  // the final step lands on roundoff, which the unfiltered ratio does not know about
  CHECK(res.report.max_tail_ratio(3) >= res.report.max_tail_ratio(3, 1e-13));
}

TEST_CASE("identical inputs give identical iterates") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 8});
  std::mt19937_64 rng(37);
  const Configuration init = testing::random_admissible(pb, rng, 0.1);
  const MaterialLaw law = MaterialLaw::smoothed_abs();
  const SolveResult a = newton_minimize(pb, law, init);
  const SolveResult b = newton_minimize(pb, law, init);
  REQUIRE(a.report.history.size() == b.report.history.size());
  for (std::size_t k = 0; k < a.report.history.size(); ++k) {
    CHECK(a.report.history[k].energy == b.report.history[k].energy);
    CHECK(a.report.history[k].grad_inf == b.report.history[k].grad_inf);
  }
  CHECK(a.config == b.config);
}

TEST_CASE("plain Newton reaches the same minimizer from a nearby start") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 4});
  const MaterialLaw law = MaterialLaw::zero_psi();
  const Configuration init = linear_init(pb.graph, pb.spec.phi, LinearMode::Det1);
  const SolveResult damped = newton_minimize(pb, law, init);
  NewtonOptions plain;
  plain.plain = true;
  const SolveResult undamped = newton_minimize(pb, law, init, plain);
  CHECK(undamped.report.converged);
  CHECK(undamped.report.final_energy == doctest::Approx(damped.report.final_energy).epsilon(1e-10));
}

TEST_CASE("iteration cap is reported, not thrown") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 8});
  NewtonOptions opts;
  opts.max_iter = 1;
  const SolveResult res =
      newton_minimize(pb, MaterialLaw::zero_psi(), linear_init(pb.graph, pb.spec.phi, LinearMode::Det1), opts);
  CHECK_FALSE(res.report.converged);
  CHECK(res.report.iterations == 1);
}

TEST_CASE("inadmissible start and bad options are rejected") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 2});
  CHECK_THROWS_AS(newton_minimize(pb, MaterialLaw::zero_psi(), pb.graph.reference), std::invalid_argument);
  NewtonOptions bad;
  bad.grad_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("solve log") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 2});
  const SolveResult res =
      newton_minimize(pb, MaterialLaw::zero_psi(), linear_init(pb.graph, pb.spec.phi, LinearMode::Det1));
  std::ostringstream os;
  write_solve_log(os, res.report);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "iter,energy,grad_inf,step_norm,tau");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == static_cast<int>(res.report.history.size()));
}
