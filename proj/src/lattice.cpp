#include "discl/lattice.hpp"

#include <cmath>
#include <sstream>

namespace discl {

int vertex_id(int n, int i, int j) { return j * (n + 1) - j * (j - 1) / 2 + i; }

Vec2 lattice_point(double eps, double i, double j) {
  return {eps * (i + 0.5 * j), eps * j * (std::sqrt(3.0) / 2.0)};
}

int LatticeGraph::id(int i, int j) const {
  if (i < 0 || j < 0 || i + j > n) {
    std::ostringstream msg;
    msg << "lattice point (" << i << ", " << j << ") outside triangle of size " << n;
    throw LatticeError(msg.str());
  }
  return vertex_id(n, i, j);
}

double LatticeGraph::triangle_area() const { return std::sqrt(3.0) / 4.0 * eps * eps; }

LatticeGraph build_lattice(const LatticeSpec& spec) {
  if (spec.n < 1) throw LatticeError("lattice needs n >= 1 subdivisions");
  const int n = spec.n;
  LatticeGraph g;
  g.n = n;
  g.eps = spec.eps();

  const std::size_t nv = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 2) / 2;
  g.ij.reserve(nv);
  g.boundary.reserve(nv);
  g.reference.resize(2, static_cast<Eigen::Index>(nv));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i + j <= n; ++i) {
      const auto v = static_cast<Eigen::Index>(g.ij.size());
      g.ij.push_back({i, j});
      unsigned flags = kInterior;
      if (j == 0) flags |= kGamma1;
      if (i == 0) flags |= kGamma2;
      if (i + j == n) flags |= kGamma3;
      g.boundary.push_back(flags);
      g.reference.col(v) = lattice_point(g.eps, i, j);
    }
  }

  auto add_edge = [&](int a, int b) {
    const unsigned shared = g.boundary[a] & g.boundary[b];
    g.edges.push_back({a, b, shared != kInterior ? 0.5 : 1.0});
  };
  g.edges.reserve(3 * static_cast<std::size_t>(n) * (n + 1) / 2);
  g.triangles.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i + j < n; ++i) {
      const int v = vertex_id(n, i, j);
      const int right = vertex_id(n, i + 1, j);
      const int up = vertex_id(n, i, j + 1);
      add_edge(v, right);
      add_edge(v, up);
      add_edge(right, up);
      g.triangles.push_back({v, right, up});
      if (i + j + 2 <= n) g.triangles.push_back({right, vertex_id(n, i + 1, j + 1), up});
    }
  }
  return g;
}

ConstraintMap build_constraints(const LatticeGraph& graph, double phi) {
  ConstraintMap cmap;
  cmap.phi = phi;
  cmap.rotation = rotation(phi);
  cmap.pinned = graph.id(0, 0);
  for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
    const auto [i, j] = graph.ij[v];
    if (j != 0 || i == 0) continue;
    // Reference partner R_{pi/3} (eps i e1) = eps i R_{pi/3} e1, which is (0, i).
    if (i > graph.n) throw LatticeError("bottom-edge vertex without a partner on the left edge");
    const int partner = graph.id(0, i);
    if ((graph.boundary[partner] & kGamma2) == 0u) {
      throw LatticeError("partner of bottom-edge vertex is not on the left edge");
    }
    cmap.pairs.push_back({static_cast<int>(v), partner});
  }
  return cmap;
}

DofLayout build_layout(const LatticeGraph& graph, const ConstraintMap& cmap) {
  DofLayout layout;
  std::vector<bool> eliminated(graph.num_vertices(), false);
  eliminated[cmap.pinned] = true;
  for (const auto& pair : cmap.pairs) {
    if (eliminated[pair.master]) throw LatticeError("vertex is both master and slave");
    eliminated[pair.slave] = true;
  }
  layout.reduced_of_vertex.assign(graph.num_vertices(), -1);
  for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
    if (eliminated[v]) continue;
    layout.reduced_of_vertex[v] = static_cast<int>(layout.free_ids.size());
    layout.free_ids.push_back(static_cast<int>(v));
  }
  return layout;
}

Configuration expand(const Eigen::VectorXd& reduced, const ConstraintMap& cmap,
                     const DofLayout& layout, std::size_t num_vertices) {
  if (reduced.size() != layout.size()) {
    std::ostringstream msg;
    msg << "reduced vector has size " << reduced.size() << ", layout expects " << layout.size();
    throw LatticeError(msg.str());
  }
  Configuration u = Configuration::Zero(2, static_cast<Eigen::Index>(num_vertices));
  for (std::size_t f = 0; f < layout.free_ids.size(); ++f) {
    u.col(layout.free_ids[f]) = reduced.segment<2>(2 * static_cast<Eigen::Index>(f));
  }
  for (const auto& pair : cmap.pairs) u.col(pair.slave) = cmap.rotation * u.col(pair.master);
  return u;
}

Eigen::VectorXd reduce(const Configuration& config, const DofLayout& layout) {
  if (config.cols() != static_cast<Eigen::Index>(layout.reduced_of_vertex.size())) {
    std::ostringstream msg;
    msg << "configuration has " << config.cols() << " vertices, layout expects "
        << layout.reduced_of_vertex.size();
    throw LatticeError(msg.str());
  }
  Eigen::VectorXd r(layout.size());
  for (std::size_t f = 0; f < layout.free_ids.size(); ++f) {
    r.segment<2>(2 * static_cast<Eigen::Index>(f)) = config.col(layout.free_ids[f]);
  }
  return r;
}

Problem::Problem(const LatticeSpec& s)
    : spec(s),
      graph(build_lattice(s)),
      cmap(build_constraints(graph, s.phi)),
      layout(build_layout(graph, cmap)) {}

double Problem::admissibility_defect(const Configuration& config) const {
  double defect = config.col(cmap.pinned).norm();
  for (const auto& pair : cmap.pairs) {
    defect = std::max(defect,
                      (config.col(pair.slave) - cmap.rotation * config.col(pair.master)).norm());
  }
  return defect;
}

}  // namespace discl
