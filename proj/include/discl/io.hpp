// Text dumps of lattices and configurations, and SVG rendering of deformed lattices.
#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "discl/energy.hpp"
#include "discl/lattice.hpp"

namespace discl {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lines `v id i j x y`, `e id v1 v2 w`, `t id v1 v2 v3`, `c master slave`, `pin id`.
void write_lattice(std::ostream& os, const LatticeGraph& graph, const ConstraintMap& cmap);

struct LatticeDump {
  LatticeGraph graph;
  ConstraintMap cmap;  // rotation is not stored; phi left at 0
};

LatticeDump read_lattice(std::istream& is);

struct ConfigHeader {
  double phi = 0.0;
  int n = 0;
  double p = 2.0;
  std::string psi = "zero";
};

/// Header `# phi=<val> n=<N> p=<val> psi=<name>`, then `u id ux uy` per vertex.
void write_configuration(std::ostream& os, const Configuration& config, const ConfigHeader& header);

struct ConfigFile {
  ConfigHeader header;
  Configuration config;
};

ConfigFile read_configuration(std::istream& is);

ConfigFile load_configuration(const std::filesystem::path& path);
void save_configuration(const std::filesystem::path& path, const Configuration& config,
                        const ConfigHeader& header);

struct RenderOptions {
  bool all_copies = false;  // composite R_phi^k u for k < floor(2 pi / phi)
  double size_px = 600.0;
  bool show_vertices = true;
  bool highlight_inverted = true;  // fill triangles with det <= 0
};

/// Deterministic SVG of the deformed lattice.
void render_svg(std::ostream& os, const LatticeGraph& graph, const Configuration& config,
                double phi, const RenderOptions& opts = {});

}  // namespace discl
