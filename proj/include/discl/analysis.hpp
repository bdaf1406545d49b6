// Diagnostics and numerical checks: determinant fields, 2x2 singular values,
// distance to SO(2), the six-bond inequality, the rank-one laminate at 0,
// sampled rigidity, and frustration of computed minimizers.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "discl/energy.hpp"
#include "discl/experiments.hpp"
#include "discl/lattice.hpp"

namespace discl {

struct DetStats {
  std::vector<double> values;  // per triangle
  double min = 0.0;
  long nonpositive = 0;
};

DetStats triangle_dets(const LatticeGraph& graph, const Configuration& config);

/// A = P1 diag(s1, s2) P2 with P1, P2 in O(2) and 0 <= s1 <= s2.
struct Svd2 {
  double s1 = 0.0;
  double s2 = 0.0;
  int det_sign = 0;  // -1, 0, +1
  Mat2 p1 = Mat2::Identity();
  Mat2 p2 = Mat2::Identity();

  Mat2 reconstruct() const;
};

/// Closed-form 2x2 singular value decomposition.
Svd2 svd2(const Mat2& a);

/// dist^p(A, SO(2)) in the Frobenius norm.
double dist_so2(const Mat2& a, double p);

/// One line of the `verify` report.
struct CheckReport {
  std::string check;
  bool pass = false;
  double min_slack = 0.0;  // check-specific margin; positive is good
  long samples = 0;
  long violations = 0;
  std::string detail;
};

/// Sampled check of 14 sum_k (|S R_{theta + k pi/3} e1| - 1)^2 >= (s1 - 1)^2 + (s2 - 1)^2.
CheckReport check_six_bond(long n_samples, std::uint64_t seed);

/// Left minus right side of the six-bond inequality.
double six_bond_slack(double s1, double s2, double theta);

struct LaminateWitness {
  std::array<Mat2, 4> matrices;
  std::array<double, 4> weights{0.25, 0.25, 0.25, 0.25};

  static LaminateWitness standard();
};

CheckReport check_laminate();

/// Minimum over random A of W(A) / dist_so2(A, p); law must penalize volume change.
CheckReport check_rigidity(const MaterialLaw& law, long n_samples, std::uint64_t seed);

/// closed form dist_so2 against a brute-force rotation-angle grid.
CheckReport check_dist_so2(long n_matrices, long grid, std::uint64_t seed);

/// Converged energies above min_energy, and an extrapolated limit under refinement above it too.
CheckReport frustration_check(const std::vector<SweepRecord>& sweeps, double min_energy);

/// Energies decreasing with fold count.
CheckReport fold_trend_check(const std::vector<FoldStudy>& studies);

void write_report_text(std::ostream& os, const std::vector<CheckReport>& reports);
void write_report_jsonl(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace discl
