// Stored-energy density of a deformed triangular cell and the lattice energy
//   E(u) = sum_T |T| W(grad U|_T),
//   W(A) = sum_{e in B1} Phi(|A e| - 1) + Psi(det A),   Phi(r) = |r|^p / p,
// with its gradient and Hessian in the reduced (constraint-eliminated) unknowns.
//
// Convention: A is the Jacobian of the piecewise-linear interpolant, so A e is
// the deformed image of the unit bond e. This is the row-vector form |e A| with
// the gradient stored transposed.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "discl/lattice.hpp"

namespace discl {

enum class PsiKind { Zero, SmoothedAbs };

struct MaterialLaw {
  double p = 2.0;
  PsiKind psi = PsiKind::Zero;
  double kappa = 1.0;
  double delta = 1e-2;
  // Count boundary bonds with full weight instead of 1/2.
  bool uniform_weights = false;

  static MaterialLaw zero_psi(double p = 2.0) { return {p, PsiKind::Zero, 1.0, 1e-2, false}; }
  static MaterialLaw smoothed_abs(double p = 2.0, double kappa = 1.0, double delta = 1e-2) {
    return {p, PsiKind::SmoothedAbs, kappa, delta, false};
  }

  /// Throws std::invalid_argument on p < 2 or non-positive penalty parameters.
  void validate() const;
  std::string psi_name() const;
};

/// |A e| at or below this makes the bond derivative meaningless.
inline constexpr double kBondFloor = 1e-9;

class DegenerateCellError : public std::runtime_error {
 public:
  DegenerateCellError(long triangle, const std::string& what)
      : std::runtime_error(what), triangle_(triangle) {}
  long triangle() const { return triangle_; }

 private:
  long triangle_;
};

class NonFiniteEnergyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The six unit bonds R_{k pi/3} e1, k = 0..5.
template <typename Scalar>
std::array<Eigen::Matrix<Scalar, 2, 1>, 6> bond_directions() {
  std::array<Eigen::Matrix<Scalar, 2, 1>, 6> dirs;
  const Scalar pi = Scalar(kPi);
  for (int k = 0; k < 6; ++k) {
    using std::cos;
    using std::sin;
    const Scalar t = pi * Scalar(k) / Scalar(3);
    dirs[k] << cos(t), sin(t);
  }
  // Exact opposite pairs keep the set closed under negation to the last bit.
  for (int k = 3; k < 6; ++k) dirs[k] = -dirs[k - 3];
  return dirs;
}

template <typename Scalar>
Scalar bond_potential(Scalar r, double p) {
  using std::abs;
  using std::pow;
  return pow(abs(r), p) / Scalar(p);
}

template <typename Scalar>
Scalar volume_penalty(Scalar a, const MaterialLaw& law) {
  if (law.psi == PsiKind::Zero) return Scalar(0);
  using std::sqrt;
  const Scalar d = a - Scalar(1);
  return Scalar(law.kappa) * (sqrt(d * d + Scalar(law.delta * law.delta)) - Scalar(law.delta));
}

/// W(A).
template <typename Derived>
typename Derived::Scalar w_density(const Eigen::MatrixBase<Derived>& a, const MaterialLaw& law) {
  using Scalar = typename Derived::Scalar;
  static_assert(Derived::RowsAtCompileTime == 2 && Derived::ColsAtCompileTime == 2,
                "w_density expects a 2x2 matrix");
  const Eigen::Matrix<Scalar, 2, 2> m = a;
  Scalar w(0);
  for (const auto& e : bond_directions<Scalar>()) w += bond_potential<Scalar>((m * e).norm() - Scalar(1), law.p);
  return w + volume_penalty<Scalar>(m.determinant(), law);
}

/// First and second derivatives of Phi(|r|) wrt r, i.e. |r|^{p-1} sgn r and (p-1)|r|^{p-2}.
struct BondDerivatives {
  double d1;
  double d2;
};

inline BondDerivatives bond_derivatives(double r, double p) {
  const double ar = std::abs(r);
  if (p == 2.0) return {r, 1.0};
  const double d2 = (p - 1.0) * std::pow(ar, p - 2.0);
  return {std::copysign(std::pow(ar, p - 1.0), r), d2};
}

/// (Psi'(a), Psi''(a)).
inline std::array<double, 2> volume_penalty_derivatives(double a, const MaterialLaw& law) {
  if (law.psi == PsiKind::Zero) return {0.0, 0.0};
  const double d = a - 1.0;
  const double s = std::sqrt(d * d + law.delta * law.delta);
  return {law.kappa * d / s, law.kappa * law.delta * law.delta / (s * s * s)};
}

/// dW/dA. Throws DegenerateCellError when some |A e| <= kBondFloor.
Mat2 w_grad(const Mat2& a, const MaterialLaw& law);

/// d^2W/dA^2 acting on column-major vec(A) = (a00, a10, a01, a11).
Eigen::Matrix4d w_hess(const Mat2& a, const MaterialLaw& law);

/// Constant gradient of the piecewise-linear interpolant on triangle t.
Mat2 cell_gradient(const LatticeGraph& graph, const Configuration& config, std::size_t t);

/// Same, for an explicit triangle of vertex positions (reference x, deformed u).
Mat2 cell_gradient(const Vec2& xa, const Vec2& xb, const Vec2& xc, const Vec2& ua, const Vec2& ub,
                   const Vec2& uc);

double assemble_energy(const LatticeGraph& graph, const Configuration& config,
                       const MaterialLaw& law);

/// Gradient wrt all vertex positions (no constraints applied), 2 x |V|.
Configuration assemble_full_gradient(const LatticeGraph& graph, const Configuration& config,
                                     const MaterialLaw& law);

Eigen::VectorXd assemble_gradient(const LatticeGraph& graph, const Configuration& config,
                                  const MaterialLaw& law, const ConstraintMap& cmap,
                                  const DofLayout& layout);

/// Reduced Hessian, both triangles stored.
Eigen::SparseMatrix<double> assemble_hessian(const LatticeGraph& graph, const Configuration& config,
                                             const MaterialLaw& law, const ConstraintMap& cmap,
                                             const DofLayout& layout);

/// Independent route: (sqrt(3)/2) [ eps^2 sum over directed bonds w Phi(|u_i - u_j|/eps - 1)
///                                 + (eps^2/2) sum_T Psi(det A_T) ].
double bond_sum_energy(const LatticeGraph& graph, const Configuration& config,
                       const MaterialLaw& law);

inline double assemble_energy(const Problem& pb, const Configuration& u, const MaterialLaw& law) {
  return assemble_energy(pb.graph, u, law);
}
inline Eigen::VectorXd assemble_gradient(const Problem& pb, const Configuration& u,
                                         const MaterialLaw& law) {
  return assemble_gradient(pb.graph, u, law, pb.cmap, pb.layout);
}
inline Eigen::SparseMatrix<double> assemble_hessian(const Problem& pb, const Configuration& u,
                                                    const MaterialLaw& law) {
  return assemble_hessian(pb.graph, u, law, pb.cmap, pb.layout);
}

/// Number of worker threads used by assembly: DISCL_THREADS if set, else hardware concurrency.
unsigned assembly_threads();

}  // namespace discl
