#include "discl/energy.hpp"

#include <cstdlib>
#include <sstream>
#include <thread>
#include <vector>

#include "parallel.hpp"

namespace discl {

void MaterialLaw::validate() const {
  if (!(p >= 2.0) || !std::isfinite(p)) throw std::invalid_argument("bond exponent p must be >= 2");
  if (psi == PsiKind::SmoothedAbs && !(kappa > 0.0 && delta > 0.0)) {
    throw std::invalid_argument("smoothed-abs volume penalty needs kappa > 0 and delta > 0");
  }
}

std::string MaterialLaw::psi_name() const {
  return psi == PsiKind::Zero ? "zero" : "smoothed_abs";
}

unsigned assembly_threads() {
  if (const char* env = std::getenv("DISCL_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Neumaier-compensated sum, in index order.
double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

void check_bond(double r, long triangle) {
  if (!(r > kBondFloor)) {
    std::ostringstream msg;
    msg << "degenerate cell";
    if (triangle >= 0) msg << " in triangle " << triangle;
    msg << ": deformed bond length " << r << " below floor " << kBondFloor;
    throw DegenerateCellError(triangle, msg.str());
  }
}

Mat2 w_grad_impl(const Mat2& a, const MaterialLaw& law, long triangle) {
  Mat2 g = Mat2::Zero();
  for (const auto& e : bond_directions<double>()) {
    const Vec2 b = a * e;
    const double r = b.norm();
    check_bond(r, triangle);
    const auto d = bond_derivatives(r - 1.0, law.p);
    g.noalias() += (d.d1 / r) * b * e.transpose();
  }
  if (law.psi != PsiKind::Zero) {
    const auto dpsi = volume_penalty_derivatives(a.determinant(), law);
    Mat2 cof;
    cof << a(1, 1), -a(1, 0), -a(0, 1), a(0, 0);
    g += dpsi[0] * cof;
  }
  return g;
}

Eigen::Matrix4d w_hess_impl(const Mat2& a, const MaterialLaw& law, long triangle) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  for (const auto& e : bond_directions<double>()) {
    const Vec2 b = a * e;
    const double r = b.norm();
    check_bond(r, triangle);
    const Vec2 bhat = b / r;
    const auto d = bond_derivatives(r - 1.0, law.p);
    // dr/dvec(A) = e (x) bhat,  d2r/dvec(A)^2 = (e e^T) (x) (I - bhat bhat^T) / r.
    Eigen::Vector4d dr;
    dr << e(0) * bhat, e(1) * bhat;
    const Mat2 proj = (Mat2::Identity() - bhat * bhat.transpose()) / r;
    h.noalias() += d.d2 * dr * dr.transpose();
    for (int j = 0; j < 2; ++j) {
      for (int l = 0; l < 2; ++l) h.block<2, 2>(2 * j, 2 * l) += (d.d1 * e(j) * e(l)) * proj;
    }
  }
  if (law.psi != PsiKind::Zero) {
    const auto dpsi = volume_penalty_derivatives(a.determinant(), law);
    Eigen::Vector4d ddet(a(1, 1), -a(0, 1), -a(1, 0), a(0, 0));
    h.noalias() += dpsi[1] * ddet * ddet.transpose();
    h(0, 3) += dpsi[0];
    h(3, 0) += dpsi[0];
    h(1, 2) -= dpsi[0];
    h(2, 1) -= dpsi[0];
  }
  return h;
}

// Per-triangle shape data: J = sum_k u_k c_k^T with c_a = -(c_b + c_c).
struct CellShape {
  std::array<Vec2, 3> coeff;
};

CellShape cell_shape(const Vec2& xa, const Vec2& xb, const Vec2& xc) {
  Mat2 m;
  m.col(0) = xb - xa;
  m.col(1) = xc - xa;
  const Mat2 minv = m.inverse();
  CellShape s;
  s.coeff[1] = minv.row(0).transpose();
  s.coeff[2] = minv.row(1).transpose();
  s.coeff[0] = -(s.coeff[1] + s.coeff[2]);
  return s;
}

Mat2 gradient_from_shape(const CellShape& s, const LatticeGraph& g, const Configuration& u,
                         std::size_t t) {
  const auto& tri = g.triangles[t];
  Mat2 j = Mat2::Zero();
  for (int k = 0; k < 3; ++k) j.noalias() += u.col(tri[k]) * s.coeff[k].transpose();
  return j;
}

// Reference shape data depends only on triangle orientation (up or down), but
// compute it per triangle so arbitrary reference graphs would work too.
std::vector<CellShape> shapes(const LatticeGraph& g) {
  std::vector<CellShape> out(g.num_triangles());
  for (std::size_t t = 0; t < g.num_triangles(); ++t) {
    const auto& tri = g.triangles[t];
    out[t] = cell_shape(g.reference.col(tri[0]), g.reference.col(tri[1]), g.reference.col(tri[2]));
  }
  return out;
}

double boundary_bond_scale(const LatticeGraph& g) { return std::sqrt(3.0) / 2.0 * g.eps * g.eps; }

// Vertex -> reduced block and the 2x2 map from reduced to full values.
struct DofMap {
  std::vector<int> block;  // -1: pinned
  std::vector<char> slaved;
};

DofMap dof_map(const LatticeGraph& g, const ConstraintMap& cmap, const DofLayout& layout) {
  DofMap map;
  map.block = layout.reduced_of_vertex;
  map.slaved.assign(g.num_vertices(), 0);
  for (const auto& pair : cmap.pairs) {
    map.block[pair.slave] = layout.reduced_of_vertex[pair.master];
    map.slaved[pair.slave] = 1;
  }
  map.block[cmap.pinned] = -1;
  return map;
}

void check_sizes(const LatticeGraph& g, const Configuration& u) {
  if (u.cols() != static_cast<Eigen::Index>(g.num_vertices())) {
    std::ostringstream msg;
    msg << "configuration has " << u.cols() << " vertices, lattice has " << g.num_vertices();
    throw LatticeError(msg.str());
  }
}

}  // namespace

Mat2 w_grad(const Mat2& a, const MaterialLaw& law) { return w_grad_impl(a, law, -1); }

Eigen::Matrix4d w_hess(const Mat2& a, const MaterialLaw& law) { return w_hess_impl(a, law, -1); }

Mat2 cell_gradient(const Vec2& xa, const Vec2& xb, const Vec2& xc, const Vec2& ua, const Vec2& ub,
                   const Vec2& uc) {
  Mat2 m;
  m.col(0) = xb - xa;
  m.col(1) = xc - xa;
  Mat2 d;
  d.col(0) = ub - ua;
  d.col(1) = uc - ua;
  return d * m.inverse();
}

Mat2 cell_gradient(const LatticeGraph& graph, const Configuration& config, std::size_t t) {
  const auto& tri = graph.triangles.at(t);
  const auto& x = graph.reference;
  return cell_gradient(x.col(tri[0]), x.col(tri[1]), x.col(tri[2]), config.col(tri[0]),
                       config.col(tri[1]), config.col(tri[2]));
}

double assemble_energy(const LatticeGraph& graph, const Configuration& config,
                       const MaterialLaw& law) {
  check_sizes(graph, config);
  const auto shape = shapes(graph);
  const double area = graph.triangle_area();
  std::vector<double> cell(graph.num_triangles() + (law.uniform_weights ? graph.num_edges() : 0), 0.0);
  detail::parallel_for(graph.num_triangles(), assembly_threads(), [&](std::size_t t) {
    cell[t] = area * w_density(gradient_from_shape(shape[t], graph, config, t), law);
  });
  if (law.uniform_weights) {
    const double scale = boundary_bond_scale(graph);
    for (std::size_t k = 0; k < graph.num_edges(); ++k) {
      const auto& e = graph.edges[k];
      if (e.weight == 1.0) continue;
      const double r = (config.col(e.v0) - config.col(e.v1)).norm() / graph.eps;
      cell[graph.num_triangles() + k] = scale * bond_potential(r - 1.0, law.p);
    }
  }
  const double energy = compensated_sum(cell);
  if (!std::isfinite(energy)) throw NonFiniteEnergyError("lattice energy is not finite");
  return energy;
}

Configuration assemble_full_gradient(const LatticeGraph& graph, const Configuration& config,
                                     const MaterialLaw& law) {
  check_sizes(graph, config);
  const auto shape = shapes(graph);
  const double area = graph.triangle_area();
  std::vector<std::array<Vec2, 3>> local(graph.num_triangles());
  detail::parallel_for(graph.num_triangles(), assembly_threads(), [&](std::size_t t) {
    const Mat2 gw = area * w_grad_impl(gradient_from_shape(shape[t], graph, config, t), law,
                                       static_cast<long>(t));
    for (int k = 0; k < 3; ++k) local[t][k] = gw * shape[t].coeff[k];
  });
  Configuration g = Configuration::Zero(2, config.cols());
  for (std::size_t t = 0; t < graph.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) g.col(graph.triangles[t][k]) += local[t][k];
  }
  if (law.uniform_weights) {
    const double scale = boundary_bond_scale(graph);
    for (const auto& e : graph.edges) {
      if (e.weight == 1.0) continue;
      const Vec2 d = config.col(e.v0) - config.col(e.v1);
      const double len = d.norm();
      check_bond(len / graph.eps, -1);
      const Vec2 f = scale * bond_derivatives(len / graph.eps - 1.0, law.p).d1 / graph.eps * d / len;
      g.col(e.v0) += f;
      g.col(e.v1) -= f;
    }
  }
  return g;
}

Eigen::VectorXd assemble_gradient(const LatticeGraph& graph, const Configuration& config,
                                  const MaterialLaw& law, const ConstraintMap& cmap,
                                  const DofLayout& layout) {
  const Configuration full = assemble_full_gradient(graph, config, law);
  Eigen::VectorXd r = reduce(full, layout);
  const Mat2 rt = cmap.rotation.transpose();
  for (const auto& pair : cmap.pairs) {
    const auto f = 2 * static_cast<Eigen::Index>(layout.reduced_of_vertex[pair.master]);
    r.segment<2>(f) += rt * full.col(pair.slave);
  }
  return r;
}

Eigen::SparseMatrix<double> assemble_hessian(const LatticeGraph& graph, const Configuration& config,
                                             const MaterialLaw& law, const ConstraintMap& cmap,
                                             const DofLayout& layout) {
  check_sizes(graph, config);
  const auto shape = shapes(graph);
  const auto map = dof_map(graph, cmap, layout);
  const double area = graph.triangle_area();
  const Mat2& rot = cmap.rotation;

  using Triplet = Eigen::Triplet<double>;
  constexpr std::size_t kPerCell = 36;
  std::vector<Triplet> triplets(graph.num_triangles() * kPerCell, Triplet(0, 0, 0.0));

  auto scatter_block = [&](Triplet* out, int va, int vb, Mat2 block) {
    const int fa = map.block[va];
    const int fb = map.block[vb];
    if (fa < 0 || fb < 0) {
      for (int k = 0; k < 4; ++k) out[k] = Triplet(0, 0, 0.0);
      return;
    }
    if (map.slaved[va]) block = rot.transpose() * block;
    if (map.slaved[vb]) block = block * rot;
    int k = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out[k++] = Triplet(2 * fa + i, 2 * fb + j, block(i, j));
    }
  };

  detail::parallel_for(graph.num_triangles(), assembly_threads(), [&](std::size_t t) {
    const Mat2 a = gradient_from_shape(shape[t], graph, config, t);
    const Eigen::Matrix4d hw = w_hess_impl(a, law, static_cast<long>(t));
    // K(i + 2j, 2k + i) = c_k[j]: derivative of vec(A) wrt local vertex coordinates.
    Eigen::Matrix<double, 4, 6> kmat = Eigen::Matrix<double, 4, 6>::Zero();
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) kmat(i + 2 * j, 2 * k + i) = shape[t].coeff[k](j);
      }
    }
    const Eigen::Matrix<double, 6, 6> local = area * kmat.transpose() * hw * kmat;
    const auto& tri = graph.triangles[t];
    Triplet* out = triplets.data() + t * kPerCell;
    for (int ka = 0; ka < 3; ++ka) {
      for (int kb = 0; kb < 3; ++kb) {
        scatter_block(out, tri[ka], tri[kb], local.block<2, 2>(2 * ka, 2 * kb));
        out += 4;
      }
    }
  });

  if (law.uniform_weights) {
    const double scale = boundary_bond_scale(graph);
    for (const auto& e : graph.edges) {
      if (e.weight == 1.0) continue;
      const Vec2 d = config.col(e.v0) - config.col(e.v1);
      const double len = d.norm();
      check_bond(len / graph.eps, -1);
      const Vec2 dhat = d / len;
      const auto bd = bond_derivatives(len / graph.eps - 1.0, law.p);
      const Mat2 h = scale * (bd.d2 / (graph.eps * graph.eps) * dhat * dhat.transpose() +
                              bd.d1 / (graph.eps * len) * (Mat2::Identity() - dhat * dhat.transpose()));
      std::array<Triplet, 4> buf;
      const int vs[2] = {e.v0, e.v1};
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          scatter_block(buf.data(), vs[x], vs[y], x == y ? h : Mat2(-h));
          triplets.insert(triplets.end(), buf.begin(), buf.end());
        }
      }
    }
  }

  Eigen::SparseMatrix<double> hess(layout.size(), layout.size());
  hess.setFromTriplets(triplets.begin(), triplets.end());
  return hess;
}

double bond_sum_energy(const LatticeGraph& graph, const Configuration& config,
                       const MaterialLaw& law) {
  check_sizes(graph, config);
  const double eps = graph.eps;
  std::vector<double> terms;
  terms.reserve(2 * graph.num_edges() + graph.num_triangles());
  for (const auto& e : graph.edges) {
    const double w = law.uniform_weights ? 1.0 : e.weight;
    // Both orientations i->j and j->i of every bond.
    const double r_ij = (config.col(e.v0) - config.col(e.v1)).norm() / eps;
    const double r_ji = (config.col(e.v1) - config.col(e.v0)).norm() / eps;
    terms.push_back(eps * eps * w * bond_potential(r_ij - 1.0, law.p));
    terms.push_back(eps * eps * w * bond_potential(r_ji - 1.0, law.p));
  }
  const double area = graph.triangle_area();
  for (std::size_t t = 0; t < graph.num_triangles(); ++t) {
    // det A_T as signed deformed area over reference area.
    const auto& tri = graph.triangles[t];
    const Vec2 p = config.col(tri[1]) - config.col(tri[0]);
    const Vec2 q = config.col(tri[2]) - config.col(tri[0]);
    const double det = 0.5 * (p(0) * q(1) - p(1) * q(0)) / area;
    terms.push_back(0.5 * eps * eps * volume_penalty(det, law));
  }
  return std::sqrt(3.0) / 2.0 * compensated_sum(terms);
}

}  // namespace discl
