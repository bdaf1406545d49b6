#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "discl/analysis.hpp"
#include "support.hpp"

using namespace discl;

namespace {

Mat2 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat2 a;
  a << nd(rng), nd(rng), nd(rng), nd(rng);
  return a;
}

double min_second_singular(const Mat2& a) { return svd2(a).s1; }

}  // namespace

TEST_CASE("determinant field") {
  const LatticeGraph g = build_lattice({1.0, 5});
  const DetStats ref = triangle_dets(g, g.reference);
  for (double d : ref.values) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ref.nonpositive == 0);
  Mat2 a;
  a << 0.5, 2.0, -1.0, 0.3;
  const DetStats lin = triangle_dets(g, a * g.reference);
  for (double d : lin.values) CHECK(d == doctest::Approx(a.determinant()).epsilon(1e-12));
  const DetStats flipped = triangle_dets(g, Mat2(Eigen::Vector2d(1.0, -1.0).asDiagonal()) * g.reference);
  CHECK(flipped.nonpositive == static_cast<long>(g.num_triangles()));
  CHECK(flipped.min == doctest::Approx(-1.0));
}

TEST_CASE("svd2 examples") {
  const Svd2 id = svd2(Mat2::Identity());
  CHECK(id.s1 == doctest::Approx(1.0));
  CHECK(id.s2 == doctest::Approx(1.0));
  CHECK(id.det_sign == 1);
  const Svd2 r = svd2(Mat2(Mat2(Eigen::Vector2d(3.0, 1.0).asDiagonal()) * rotation(0.4)));
  CHECK(r.s1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.s2 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(svd2(Mat2::Zero()).det_sign == 0);
  CHECK(svd2(Mat2(Eigen::Vector2d(1.0, -2.0).asDiagonal())).det_sign == -1);
}

TEST_CASE("svd2 against a symmetric eigensolver") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 2000; ++trial) {
    const Mat2 a = random_matrix(rng);
    const Svd2 s = svd2(a);
    Eigen::SelfAdjointEigenSolver<Mat2> es(a.transpose() * a);
    const auto ev = es.eigenvalues();
    REQUIRE(s.s1 <= s.s2);
    CHECK(s.s1 == doctest::Approx(std::sqrt(std::max(0.0, ev[0]))).epsilon(1e-10));
    CHECK(s.s2 == doctest::Approx(std::sqrt(ev[1])).epsilon(1e-12));
    CHECK((s.reconstruct() - a).norm() <= 1e-12 * std::max(1.0, a.norm()));
    CHECK(s.s1 * s.s2 == doctest::Approx(std::abs(a.determinant())).epsilon(1e-12));
    CHECK(s.s1 * s.s1 + s.s2 * s.s2 == doctest::Approx(a.squaredNorm()).epsilon(1e-12));
    CHECK(std::abs(std::abs(s.p1.determinant()) - 1.0) < 1e-12);
    CHECK(std::abs(std::abs(s.p2.determinant()) - 1.0) < 1e-12);
    CHECK(s.det_sign == (a.determinant() > 0 ? 1 : -1));
  }
}

TEST_CASE("distance to SO(2)") {
  CHECK(dist_so2(Mat2::Identity(), 2.0) == doctest::Approx(0.0));
  CHECK(dist_so2(Mat2(rotation(1.1)), 3.0) < 1e-20);
  CHECK(dist_so2(Mat2::Zero(), 2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dist_so2(Mat2::Zero(), 3.0) == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
  // reflection: nearest rotation is at distance 2 (Frobenius), so dist^2 = 4
  CHECK(dist_so2(Mat2(Eigen::Vector2d(1.0, -1.0).asDiagonal()), 2.0) == doctest::Approx(4.0).epsilon(1e-14));

  // fine angle sampling of |A - R|^2 from both signs of det
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat2 a = random_matrix(rng);
    double best = 1e300;
    for (int k = 0; k < 20000; ++k) best = std::min(best, (a - rotation(2.0 * kPi * k / 20000.0)).squaredNorm());
    CHECK(dist_so2(a, 2.0) == doctest::Approx(best).epsilon(1e-6));
    CHECK(dist_so2(a, 2.0) <= best + 1e-12);
  }
}

TEST_CASE("closed-form distance check report") {
  const CheckReport rep = check_dist_so2(50, 100000, 1);
  CHECK(rep.pass);
  CHECK(rep.samples == 100);
  CHECK(rep.violations == 0);
}

TEST_CASE("six-bond inequality examples") {
  for (double theta : {0.0, 0.3, 1.0}) CHECK(six_bond_slack(1.0, 1.0, theta) == doctest::Approx(0.0).epsilon(1e-14));
  // all bond images vanish: 14 * 6 versus 1 + 1
  CHECK(six_bond_slack(0.0, 0.0, 0.2) == doctest::Approx(84.0 - 2.0));
  const CheckReport rep = check_six_bond(20000, 7);
  CHECK(rep.pass);
  CHECK(rep.violations == 0);
  CHECK(rep.samples == 20000);
  CHECK(rep.min_slack >= 0.0);
}

TEST_CASE("laminate witness") {
  const LaminateWitness w = LaminateWitness::standard();
  Mat2 mean = Mat2::Zero();
  for (int i = 0; i < 4; ++i) mean += w.weights[i] * w.matrices[i];
  CHECK(mean.norm() == 0.0);
  CHECK(min_second_singular(w.matrices[0] - w.matrices[1]) < 1e-12);
  CHECK(svd2(w.matrices[0] - w.matrices[1]).s2 > 1.0);
  CHECK(min_second_singular(w.matrices[2] - w.matrices[3]) < 1e-12);
  CHECK(min_second_singular(0.5 * (w.matrices[0] + w.matrices[1]) - 0.5 * (w.matrices[2] + w.matrices[3])) < 1e-12);
  for (const auto& a : w.matrices) {
    CHECK(w_density(a, MaterialLaw::zero_psi()) < 1e-12);
    for (const auto& e : bond_directions<double>()) CHECK((a * e).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(check_laminate().pass);
}

TEST_CASE("rigidity") {
  const MaterialLaw sm = MaterialLaw::smoothed_abs();
  const Mat2 refl = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  CHECK(w_density(refl, sm) > 0.0);
  CHECK(w_density(refl, sm) / dist_so2(refl, 2.0) > 0.0);
  const CheckReport rep = check_rigidity(sm, 10000, 3);
  CHECK(rep.pass);
  CHECK(rep.min_slack > 0.0);
  CHECK_THROWS_AS(check_rigidity(MaterialLaw::zero_psi(), 100, 3), std::invalid_argument);
}

TEST_CASE("frustration and fold reports") {
  SweepRecord s;
  s.phi = 1.0;
  for (double e : {5e-3, 4e-3, 3.6e-3, 3.5e-3}) {
    SweepLevel l;
    l.energy = e;
    l.converged = true;
    s.levels.push_back(l);
  }
  CHECK(frustration_check({s}, 1e-4).pass);
  SweepRecord vanishing = s;
  for (auto& l : vanishing.levels) l.energy *= 1e-3;
  CHECK_FALSE(frustration_check({vanishing}, 1e-4).pass);
  // a sequence heading to zero fails through its extrapolated limit
  SweepRecord to_zero = s;
  to_zero.levels[1].energy = 2.5e-3;
  to_zero.levels[2].energy = 1.25e-3 + 1e-4;
  to_zero.levels[3].energy = 0.625e-3 + 1e-4;
  CHECK_FALSE(frustration_check({to_zero}, 1e-4).pass);

  FoldStudy fs;
  for (double e : {4e-3, 3e-3, 2e-3}) {
    FoldRun r;
    r.energy = e;
    fs.runs.push_back(r);
  }
  CHECK(fold_trend_check({fs}).pass);
  fs.runs[2].energy = 3.5e-3;
  CHECK_FALSE(fold_trend_check({fs}).pass);
}

TEST_CASE("report formats") {
  CheckReport r;
  r.check = "demo";
  r.pass = true;
  r.min_slack = 0.5;
  r.samples = 3;
  std::ostringstream text, json;
  write_report_text(text, {r});
  write_report_jsonl(json, {r});
  CHECK(text.str().rfind("PASS demo", 0) == 0);
  CHECK(json.str().find("\"check\":\"demo\"") != std::string::npos);
  CHECK(json.str().find("\"pass\":true") != std::string::npos);
  CHECK(json.str().find("\"min_slack\":0.5") != std::string::npos);
}
