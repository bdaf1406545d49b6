// Reference triangular lattice on the unit equilateral triangle, its boundary
// classification, and the master/slave elimination of the wedge condition
//   u(R_{pi/3} x) = R_phi u(x)   for x on the bottom edge.
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace discl {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Deformed (or reference) positions, one column per vertex.
using Configuration = Eigen::Matrix2Xd;

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> rotation(Scalar theta) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> r;
  r << cos(theta), -sin(theta), sin(theta), cos(theta);
  return r;
}

inline constexpr double kPi = 3.14159265358979323846;

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LatticeSpec {
  double phi = 2.0 * kPi / 5.0;
  int n = 2;

  double eps() const { return 1.0 / static_cast<double>(n); }
};

/// Boundary segment flags. Gamma1: j == 0, Gamma2: i == 0, Gamma3: i + j == n.
enum BoundaryFlag : unsigned {
  kInterior = 0u,
  kGamma1 = 1u,
  kGamma2 = 2u,
  kGamma3 = 4u,
};

struct Edge {
  int v0 = 0;
  int v1 = 0;
  double weight = 1.0;  // 1/2 on the boundary, 1 inside
};

/// Counter-clockwise in the reference configuration.
using Triangle = std::array<int, 3>;

struct LatticeGraph {
  int n = 0;
  double eps = 1.0;
  std::vector<std::array<int, 2>> ij;  // lattice coordinates per vertex
  Configuration reference;             // 2 x |V|
  std::vector<unsigned> boundary;      // BoundaryFlag bitmask per vertex
  std::vector<Edge> edges;
  std::vector<Triangle> triangles;

  std::size_t num_vertices() const { return ij.size(); }
  std::size_t num_edges() const { return edges.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  /// Vertex id of lattice point (i, j); requires i, j >= 0 and i + j <= n.
  int id(int i, int j) const;

  double triangle_area() const;
};

/// Vertex id of (i, j) in a lattice with n subdivisions (rows of constant j).
int vertex_id(int n, int i, int j);

/// Position eps * (i + j/2, j sqrt(3)/2).
Vec2 lattice_point(double eps, double i, double j);

LatticeGraph build_lattice(const LatticeSpec& spec);

struct SlavePair {
  int master = 0;  // on Gamma1 \ {0}
  int slave = 0;   // on Gamma2 \ {0}, reference position R_{pi/3} * master
};

struct ConstraintMap {
  int pinned = 0;
  std::vector<SlavePair> pairs;
  double phi = 0.0;
  Mat2 rotation = Mat2::Identity();  // R_phi
};

ConstraintMap build_constraints(const LatticeGraph& graph, double phi);

/// Maps full vertex data to the reduced vector of free unknowns.
/// Free vertex f occupies reduced entries 2f, 2f + 1.
struct DofLayout {
  std::vector<int> free_ids;
  std::vector<int> reduced_of_vertex;  // -1 for pinned and slave vertices

  Eigen::Index size() const { return 2 * static_cast<Eigen::Index>(free_ids.size()); }
};

DofLayout build_layout(const LatticeGraph& graph, const ConstraintMap& cmap);

/// Fill free vertices from `reduced`, pin the origin, set slaves to R_phi * master.
Configuration expand(const Eigen::VectorXd& reduced, const ConstraintMap& cmap,
                     const DofLayout& layout, std::size_t num_vertices);

Eigen::VectorXd reduce(const Configuration& config, const DofLayout& layout);

/// Bundles everything needed to evaluate the constrained problem.
struct Problem {
  LatticeSpec spec;
  LatticeGraph graph;
  ConstraintMap cmap;
  DofLayout layout;

  explicit Problem(const LatticeSpec& s);

  Configuration expand(const Eigen::VectorXd& reduced) const {
    return discl::expand(reduced, cmap, layout, graph.num_vertices());
  }
  Eigen::VectorXd reduce(const Configuration& config) const {
    return discl::reduce(config, layout);
  }
  /// Largest violation of the wedge condition over all pairs, plus |u(0)|.
  double admissibility_defect(const Configuration& config) const;
};

}  // namespace discl
