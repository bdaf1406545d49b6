#include <cstring>
#include <random>
#include <sstream>

#include "doctest.h"
#include "discl/io.hpp"
#include "support.hpp"

using namespace discl;

TEST_CASE("lattice dump round trip") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 6});
  std::stringstream ss;
  write_lattice(ss, pb.graph, pb.cmap);
  const LatticeDump dump = read_lattice(ss);
  const LatticeGraph& g = dump.graph;
  CHECK(g.n == pb.graph.n);
  CHECK(g.eps == pb.graph.eps);
  CHECK(g.ij == pb.graph.ij);
  CHECK(g.reference == pb.graph.reference);
  CHECK(g.boundary == pb.graph.boundary);
  REQUIRE(g.num_edges() == pb.graph.num_edges());
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    CHECK(g.edges[k].v0 == pb.graph.edges[k].v0);
    CHECK(g.edges[k].v1 == pb.graph.edges[k].v1);
    CHECK(g.edges[k].weight == pb.graph.edges[k].weight);
  }
  CHECK(g.triangles == pb.graph.triangles);
  CHECK(dump.cmap.pinned == pb.cmap.pinned);
  REQUIRE(dump.cmap.pairs.size() == pb.cmap.pairs.size());
  for (std::size_t k = 0; k < pb.cmap.pairs.size(); ++k) {
    CHECK(dump.cmap.pairs[k].master == pb.cmap.pairs[k].master);
    CHECK(dump.cmap.pairs[k].slave == pb.cmap.pairs[k].slave);
  }
}

TEST_CASE("lattice dump rejects unknown records") {
  std::istringstream bad("v 0 0 0 0 0\nq 1 2\n");
  CHECK_THROWS_AS(read_lattice(bad), IoError);
  std::istringstream gap("v 0 0 0 0 0\nv 2 1 0 1 0\n");
  CHECK_THROWS_AS(read_lattice(gap), IoError);
}

TEST_CASE("configuration round trip is bit identical") {
  const Problem pb(LatticeSpec{2.0 * kPi / 7.0, 8});
  std::mt19937_64 rng(53);
  const Configuration u = testing::random_admissible(pb, rng, 0.3) * 1.2345678901234567;
  const ConfigHeader h{pb.spec.phi, 8, 3.0, "smoothed"};
  std::stringstream ss;
  write_configuration(ss, u, h);
  CHECK(ss.str().rfind("# phi=", 0) == 0);
  const ConfigFile f = read_configuration(ss);
  CHECK(f.config == u);
  CHECK(f.header.phi == h.phi);
  CHECK(f.header.n == 8);
  CHECK(f.header.p == 3.0);
  CHECK(f.header.psi == "smoothed");
}

TEST_CASE("configuration errors") {
  std::istringstream no_header("u 0 1 2\n");
  CHECK_THROWS_AS(read_configuration(no_header), IoError);
  std::istringstream dup("# phi=1 n=1 p=2 psi=zero\nu 0 1 2\nu 0 1 2\n");
  CHECK_THROWS_AS(read_configuration(dup), IoError);
  std::istringstream gap("# phi=1 n=1 p=2 psi=zero\nu 0 1 2\nu 2 1 2\n");
  CHECK_THROWS_AS(read_configuration(gap), IoError);
  CHECK_THROWS_AS(load_configuration("/nonexistent/dir/config.txt"), IoError);
  try {
    load_configuration("/nonexistent/dir/config.txt");
  } catch (const IoError& e) {
    CHECK(std::strstr(e.what(), "/nonexistent/dir/config.txt") != nullptr);
  }
}

TEST_CASE("render is deterministic and marks inverted cells") {
  const Problem pb(LatticeSpec{2.0 * kPi / 5.0, 4});
  const Configuration u = linear_init(pb.graph, pb.spec.phi, LinearMode::Det1);
  std::ostringstream a, b;
  render_svg(a, pb.graph, u, pb.spec.phi, {true});
  render_svg(b, pb.graph, u, pb.spec.phi, {true});
  CHECK(a.str() == b.str());
  CHECK(a.str().find("<svg") != std::string::npos);
  CHECK(a.str().find("id=\"copy4\"") != std::string::npos);
  CHECK(a.str().find("id=\"copy5\"") == std::string::npos);
  CHECK(a.str().find("#d9534f") == std::string::npos);

  std::ostringstream one;
  render_svg(one, pb.graph, u, pb.spec.phi);
  CHECK(one.str().find("id=\"copy1\"") == std::string::npos);

  const Configuration flipped = Mat2(Eigen::Vector2d(1.0, -1.0).asDiagonal()) * u;
  std::ostringstream inv;
  render_svg(inv, pb.graph, flipped, pb.spec.phi);
  CHECK(inv.str().find("#d9534f") != std::string::npos);

  std::ostringstream seven;
  render_svg(seven, pb.graph, u, 2.0 * kPi / 7.0, {true});
  CHECK(seven.str().find("id=\"copy6\"") != std::string::npos);
}
