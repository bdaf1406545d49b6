#include "discl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace discl {

DetStats triangle_dets(const LatticeGraph& graph, const Configuration& config) {
  DetStats stats;
  stats.values.reserve(graph.num_triangles());
  stats.min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < graph.num_triangles(); ++t) {
    const double d = cell_gradient(graph, config, t).determinant();
    stats.values.push_back(d);
    stats.min = std::min(stats.min, d);
    if (!(d > 0.0)) ++stats.nonpositive;
  }
  return stats;
}

Mat2 Svd2::reconstruct() const {
  return p1 * Eigen::Vector2d(s1, s2).asDiagonal() * p2;
}

Svd2 svd2(const Mat2& a) {
  // A = conformal + anticonformal part; A = R(alpha) diag(q + r, q - r) R(beta).
  const double e = 0.5 * (a(0, 0) + a(1, 1));
  const double f = 0.5 * (a(0, 0) - a(1, 1));
  const double g = 0.5 * (a(1, 0) + a(0, 1));
  const double h = 0.5 * (a(1, 0) - a(0, 1));
  const double q = std::hypot(e, h);
  const double r = std::hypot(f, g);
  const double a1 = std::atan2(g, f);
  const double a2 = std::atan2(h, e);
  const double alpha = 0.5 * (a2 + a1);
  const double beta = 0.5 * (a2 - a1);
  const double sx = q + r;
  const double sy = q - r;

  Svd2 out;
  out.s1 = std::abs(sy);
  out.s2 = sx;
  const double det = a.determinant();
  out.det_sign = det > 0.0 ? 1 : (det < 0.0 ? -1 : 0);
  // diag(sx, sy) = swap diag(|sy|, sx) diag(sgn sy, 1) swap.
  Mat2 swap;
  swap << 0.0, 1.0, 1.0, 0.0;
  Mat2 flip = Mat2::Identity();
  if (sy < 0.0) flip(0, 0) = -1.0;
  out.p1 = rotation(alpha) * swap;
  out.p2 = flip * swap * rotation(beta);
  return out;
}

double dist_so2(const Mat2& a, double p) {
  const Svd2 s = svd2(a);
  const double first = a.determinant() >= 0.0 ? s.s1 - 1.0 : s.s1 + 1.0;
  const double d2 = first * first + (s.s2 - 1.0) * (s.s2 - 1.0);
  return std::pow(d2, 0.5 * p);
}

double six_bond_slack(double s1, double s2, double theta) {
  const Mat2 sigma = Eigen::Vector2d(s1, s2).asDiagonal();
  double lhs = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double len = (sigma * rotation(theta + k * kPi / 3.0) * Vec2(1.0, 0.0)).norm();
    lhs += (len - 1.0) * (len - 1.0);
  }
  const double rhs = (s1 - 1.0) * (s1 - 1.0) + (s2 - 1.0) * (s2 - 1.0);
  return 14.0 * lhs - rhs;
}

CheckReport check_six_bond(long n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sv(0.0, 10.0);
  std::uniform_real_distribution<double> angle(0.0, kPi / 3.0);
  CheckReport rep;
  rep.check = "six_bond_inequality";
  rep.samples = n_samples;
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (long k = 0; k < n_samples; ++k) {
    double s1 = sv(rng);
    double s2 = sv(rng);
    if (s1 > s2) std::swap(s1, s2);
    const double slack = six_bond_slack(s1, s2, angle(rng));
    rep.min_slack = std::min(rep.min_slack, slack);
    if (slack < 0.0) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

LaminateWitness LaminateWitness::standard() {
  LaminateWitness w;
  Mat2 a1;
  a1 << 1.0, 0.0, 0.0, -1.0;
  w.matrices = {a1, Mat2::Identity(), -a1, -Mat2::Identity()};
  return w;
}

CheckReport check_laminate() {
  const auto w = LaminateWitness::standard();
  const auto& m = w.matrices;
  constexpr double tol = 1e-12;
  CheckReport rep;
  rep.check = "laminate_qw0";
  std::ostringstream detail;
  bool ok = true;

  Mat2 mean = Mat2::Zero();
  for (int i = 0; i < 4; ++i) mean += w.weights[i] * m[i];
  const bool zero_mean = mean.cwiseAbs().maxCoeff() <= tol;
  detail << "mean=" << mean.cwiseAbs().maxCoeff();
  ok = ok && zero_mean;

  auto rank_one = [&](const Mat2& d) {
    const Svd2 s = svd2(d);
    return s.s1 <= tol && s.s2 > tol;
  };
  const bool r12 = rank_one(m[0] - m[1]);
  const bool r34 = rank_one(m[2] - m[3]);
  const bool r_mid = rank_one(0.5 * (m[0] + m[1]) - 0.5 * (m[2] + m[3]));
  detail << " rank1(A1-A2)=" << r12 << " rank1(A3-A4)=" << r34 << " rank1(mid)=" << r_mid;
  ok = ok && r12 && r34 && r_mid;

  double bond_defect = 0.0;
  double wmax = 0.0;
  const MaterialLaw law = MaterialLaw::zero_psi(2.0);
  for (const auto& a : m) {
    for (const auto& e : bond_directions<double>()) {
      bond_defect = std::max(bond_defect, std::abs((a * e).squaredNorm() - 1.0));
    }
    wmax = std::max(wmax, w_density(a, law));
  }
  detail << " bond_defect=" << bond_defect << " max_W=" << wmax;
  ok = ok && bond_defect <= tol && wmax <= tol;

  // 0 <= QW(0) <= RW(0) <= sum lambda_i W(A_i).
  double upper = 0.0;
  for (int i = 0; i < 4; ++i) upper += w.weights[i] * w_density(m[i], law);
  detail << " QW0_upper=" << upper;
  ok = ok && upper <= tol;

  rep.pass = ok;
  rep.min_slack = tol - std::max({bond_defect, wmax, upper, mean.cwiseAbs().maxCoeff()});
  rep.samples = 4;
  rep.detail = detail.str();
  return rep;
}

namespace {

Mat2 random_matrix(std::mt19937_64& rng, double max_sv, bool negative_det) {
  std::uniform_real_distribution<double> sv(0.0, max_sv);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  const Mat2 d = Eigen::Vector2d(sv(rng), (negative_det ? -1.0 : 1.0) * sv(rng)).asDiagonal();
  return rotation(angle(rng)) * d * rotation(angle(rng));
}

}  // namespace

CheckReport check_rigidity(const MaterialLaw& law, long n_samples, std::uint64_t seed) {
  law.validate();
  if (law.psi == PsiKind::Zero) {
    throw std::invalid_argument("rigidity check needs a volume penalty (W vanishes on O(2) otherwise)");
  }
  std::mt19937_64 rng(seed);
  CheckReport rep;
  rep.check = "rigidity_w_over_dist_so2";
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (long k = 0; k < n_samples; ++k) {
    const Mat2 a = random_matrix(rng, 5.0, k % 2 == 1);
    const double dist = dist_so2(a, law.p);
    if (dist < 1e-8) continue;
    ++rep.samples;
    rep.min_slack = std::min(rep.min_slack, w_density(a, law) / dist);
  }
  rep.pass = rep.samples > 0 && rep.min_slack > 0.0;
  std::ostringstream detail;
  detail << "empirical c2=" << rep.min_slack;
  rep.detail = detail.str();
  return rep;
}

CheckReport check_dist_so2(long n_matrices, long grid, std::uint64_t seed) {
  std::vector<double> cs(static_cast<std::size_t>(grid));
  std::vector<double> sn(static_cast<std::size_t>(grid));
  for (long k = 0; k < grid; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(grid);
    cs[k] = std::cos(t);
    sn[k] = std::sin(t);
  }
  std::mt19937_64 rng(seed);
  CheckReport rep;
  rep.check = "dist_so2_closed_form_vs_angle_grid";
  double worst = 0.0;
  for (int sign = 0; sign < 2; ++sign) {
    for (long k = 0; k < n_matrices; ++k) {
      const Mat2 a = random_matrix(rng, 3.0, sign == 1);
      // |A - R_t|^2 = |A|^2 + 2 - 2 ((a00 + a11) cos t + (a10 - a01) sin t)
      const double tr = a(0, 0) + a(1, 1);
      const double sk = a(1, 0) - a(0, 1);
      double best = -std::numeric_limits<double>::infinity();
      for (long j = 0; j < grid; ++j) best = std::max(best, tr * cs[j] + sk * sn[j]);
      const double brute = a.squaredNorm() + 2.0 - 2.0 * best;
      const double closed = dist_so2(a, 2.0);
      const double rel = std::abs(closed - brute) / std::max(brute, 1e-300);
      worst = std::max(worst, rel);
      ++rep.samples;
      if (rel > 1e-6) ++rep.violations;
    }
  }
  rep.min_slack = 1e-6 - worst;
  rep.pass = rep.violations == 0;
  std::ostringstream detail;
  detail << "max relative error=" << worst;
  rep.detail = detail.str();
  return rep;
}

CheckReport frustration_check(const std::vector<SweepRecord>& sweeps, double min_energy) {
  CheckReport rep;
  rep.check = "frustration_positive_energy";
  rep.min_slack = std::numeric_limits<double>::infinity();
  std::ostringstream detail;
  for (const auto& s : sweeps) {
    std::vector<double> e;
    for (const auto& l : s.levels) {
      if (!l.converged) continue;
      ++rep.samples;
      rep.min_slack = std::min(rep.min_slack, l.energy - min_energy);
      if (!(l.energy > min_energy)) ++rep.violations;
      e.push_back(l.energy);
    }
    // Aitken extrapolation of the last three levels estimates the limit energy.
    if (e.size() >= 3) {
      const double e0 = e[e.size() - 3], e1 = e[e.size() - 2], e2 = e[e.size() - 1];
      const double denom = e2 - 2.0 * e1 + e0;
      const double limit = denom != 0.0 ? e2 - (e2 - e1) * (e2 - e1) / denom : e2;
      rep.min_slack = std::min(rep.min_slack, limit - min_energy);
      if (!(limit > min_energy)) ++rep.violations;
      if (detail.tellp() > 0) detail << ' ';
      detail << "limit(phi=" << std::setprecision(6) << s.phi << ")=" << limit;
    }
  }
  rep.pass = rep.samples > 0 && rep.violations == 0;
  rep.detail = detail.str();
  return rep;
}

CheckReport fold_trend_check(const std::vector<FoldStudy>& studies) {
  CheckReport rep;
  rep.check = "fold_energy_decreasing";
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& s : studies) {
    for (std::size_t k = 1; k < s.runs.size(); ++k) {
      ++rep.samples;
      const double drop = s.runs[k - 1].energy - s.runs[k].energy;
      rep.min_slack = std::min(rep.min_slack, drop);
      if (!(drop > 0.0)) ++rep.violations;
    }
  }
  rep.pass = rep.samples > 0 && rep.violations == 0;
  return rep;
}

void write_report_text(std::ostream& os, const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    os << (r.pass ? "PASS " : "FAIL ") << r.check << " min_slack=" << std::setprecision(6)
       << r.min_slack << " samples=" << r.samples << " violations=" << r.violations;
    if (!r.detail.empty()) os << " (" << r.detail << ")";
    os << '\n';
  }
}

void write_report_jsonl(std::ostream& os, const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    nlohmann::json j;
    j["check"] = r.check;
    j["pass"] = r.pass;
    j["min_slack"] = std::isfinite(r.min_slack) ? nlohmann::json(r.min_slack) : nlohmann::json(nullptr);
    j["samples"] = r.samples;
    j["violations"] = r.violations;
    if (!r.detail.empty()) j["detail"] = r.detail;
    os << j.dump() << '\n';
  }
}

}  // namespace discl
