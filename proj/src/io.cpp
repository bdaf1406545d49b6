#include "discl/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "discl/analysis.hpp"

namespace discl {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

[[noreturn]] void parse_error(int line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "line " << line_no << ": " << what;
  throw IoError(msg.str());
}

}  // namespace

void write_lattice(std::ostream& os, const LatticeGraph& graph, const ConstraintMap& cmap) {
  os << std::setprecision(17);
  for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
    os << "v " << v << ' ' << graph.ij[v][0] << ' ' << graph.ij[v][1] << ' '
       << graph.reference(0, static_cast<Eigen::Index>(v)) << ' '
       << graph.reference(1, static_cast<Eigen::Index>(v)) << '\n';
  }
  for (std::size_t k = 0; k < graph.num_edges(); ++k) {
    const auto& e = graph.edges[k];
    os << "e " << k << ' ' << e.v0 << ' ' << e.v1 << ' ' << e.weight << '\n';
  }
  for (std::size_t t = 0; t < graph.num_triangles(); ++t) {
    const auto& tri = graph.triangles[t];
    os << "t " << t << ' ' << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  for (const auto& pair : cmap.pairs) os << "c " << pair.master << ' ' << pair.slave << '\n';
  os << "pin " << cmap.pinned << '\n';
}

LatticeDump read_lattice(std::istream& is) {
  LatticeDump dump;
  auto& g = dump.graph;
  std::vector<Vec2> positions;
  std::string line;
  int line_no = 0;
  int max_coord = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      long id;
      int i, j;
      double x, y;
      if (!(ls >> id >> i >> j >> x >> y)) parse_error(line_no, "malformed vertex record");
      if (id != static_cast<long>(g.ij.size())) parse_error(line_no, "vertex ids must be consecutive");
      g.ij.push_back({i, j});
      positions.emplace_back(x, y);
      max_coord = std::max({max_coord, i + j});
    } else if (tag == "e") {
      long id;
      Edge e;
      if (!(ls >> id >> e.v0 >> e.v1 >> e.weight)) parse_error(line_no, "malformed edge record");
      g.edges.push_back(e);
    } else if (tag == "t") {
      long id;
      Triangle t;
      if (!(ls >> id >> t[0] >> t[1] >> t[2])) parse_error(line_no, "malformed triangle record");
      g.triangles.push_back(t);
    } else if (tag == "c") {
      SlavePair p;
      if (!(ls >> p.master >> p.slave)) parse_error(line_no, "malformed constraint record");
      dump.cmap.pairs.push_back(p);
    } else if (tag == "pin") {
      if (!(ls >> dump.cmap.pinned)) parse_error(line_no, "malformed pin record");
    } else {
      parse_error(line_no, "unknown record '" + tag + "'");
    }
  }
  g.n = max_coord;
  g.eps = g.n > 0 ? 1.0 / g.n : 1.0;
  g.reference.resize(2, static_cast<Eigen::Index>(positions.size()));
  g.boundary.clear();
  for (std::size_t v = 0; v < positions.size(); ++v) {
    g.reference.col(static_cast<Eigen::Index>(v)) = positions[v];
    const auto [i, j] = g.ij[v];
    unsigned flags = kInterior;
    if (j == 0) flags |= kGamma1;
    if (i == 0) flags |= kGamma2;
    if (i + j == g.n) flags |= kGamma3;
    g.boundary.push_back(flags);
  }
  return dump;
}

void write_configuration(std::ostream& os, const Configuration& config, const ConfigHeader& header) {
  os << "# phi=" << format_double(header.phi) << " n=" << header.n << " p=" << format_double(header.p)
     << " psi=" << header.psi << '\n';
  os << std::setprecision(17);
  for (Eigen::Index v = 0; v < config.cols(); ++v) {
    os << "u " << v << ' ' << config(0, v) << ' ' << config(1, v) << '\n';
  }
}

ConfigFile read_configuration(std::istream& is) {
  ConfigFile file;
  std::map<long, Vec2> values;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string kv;
      while (ls >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        try {
          if (key == "phi") file.header.phi = std::stod(val);
          else if (key == "n") file.header.n = std::stoi(val);
          else if (key == "p") file.header.p = std::stod(val);
          else if (key == "psi") file.header.psi = val;
        } catch (const std::exception&) {
          parse_error(line_no, "bad header value for '" + key + "'");
        }
        have_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    long id;
    double x, y;
    if (!(ls >> tag >> id >> x >> y) || tag != "u") parse_error(line_no, "malformed configuration record");
    if (id < 0 || !values.emplace(id, Vec2(x, y)).second) parse_error(line_no, "duplicate or negative vertex id");
  }
  if (!have_header) throw IoError("configuration file has no header line");
  file.config.resize(2, static_cast<Eigen::Index>(values.size()));
  Eigen::Index expected = 0;
  for (const auto& [id, u] : values) {
    if (id != expected) throw IoError("configuration vertex ids are not contiguous from 0");
    file.config.col(expected++) = u;
  }
  return file;
}

ConfigFile load_configuration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file " + path.string());
  try {
    return read_configuration(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_configuration(const std::filesystem::path& path, const Configuration& config,
                        const ConfigHeader& header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write configuration file " + path.string());
  write_configuration(out, config, header);
  if (!out) throw IoError("error while writing " + path.string());
}

void render_svg(std::ostream& os, const LatticeGraph& graph, const Configuration& config,
                double phi, const RenderOptions& opts) {
  const int copies = opts.all_copies ? std::max(1, static_cast<int>(std::floor(2.0 * kPi / phi + 1e-9))) : 1;
  std::vector<Mat2> rots;
  for (int k = 0; k < copies; ++k) rots.push_back(rotation(k * phi));

  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  bool first = true;
  for (const auto& r : rots) {
    for (Eigen::Index v = 0; v < config.cols(); ++v) {
      const Vec2 p = r * config.col(v);
      if (first) {
        lo_x = hi_x = p.x();
        lo_y = hi_y = p.y();
        first = false;
      }
      lo_x = std::min(lo_x, p.x());
      hi_x = std::max(hi_x, p.x());
      lo_y = std::min(lo_y, p.y());
      hi_y = std::max(hi_y, p.y());
    }
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double margin = 0.05 * span;
  const double scale = opts.size_px / (span + 2.0 * margin);
  auto px = [&](const Vec2& p) {
    return Vec2((p.x() - lo_x + margin) * scale, (hi_y - p.y() + margin) * scale);
  };
  const double width = (hi_x - lo_x + 2.0 * margin) * scale;
  const double height = (hi_y - lo_y + 2.0 * margin) * scale;
  const double stroke = std::max(0.2, 0.6 * scale * graph.eps * 0.05);

  os << std::fixed << std::setprecision(3);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const DetStats dets = triangle_dets(graph, config);
  for (int k = 0; k < copies; ++k) {
    os << "<g id=\"copy" << k << "\">\n";
    if (opts.highlight_inverted) {
      for (std::size_t t = 0; t < graph.num_triangles(); ++t) {
        if (dets.values[t] > 0.0) continue;
        os << "<polygon fill=\"#d9534f\" fill-opacity=\"0.4\" stroke=\"none\" points=\"";
        for (int c = 0; c < 3; ++c) {
          const Vec2 p = px(rots[k] * config.col(graph.triangles[t][c]));
          os << (c ? " " : "") << p.x() << ',' << p.y();
        }
        os << "\"/>\n";
      }
    }
    os << "<path fill=\"none\" stroke=\"" << (k == 0 ? "black" : "#777777") << "\" stroke-width=\""
       << stroke << "\" d=\"";
    for (const auto& e : graph.edges) {
      const Vec2 a = px(rots[k] * config.col(e.v0));
      const Vec2 b = px(rots[k] * config.col(e.v1));
      os << 'M' << a.x() << ' ' << a.y() << 'L' << b.x() << ' ' << b.y();
    }
    os << "\"/>\n";
    if (opts.show_vertices) {
      const double radius = std::max(0.5, 0.12 * scale * graph.eps);
      for (Eigen::Index v = 0; v < config.cols(); ++v) {
        const Vec2 p = px(rots[k] * config.col(v));
        os << "<circle cx=\"" << p.x() << "\" cy=\"" << p.y() << "\" r=\"" << radius << "\"/>\n";
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
}

}  // namespace discl
