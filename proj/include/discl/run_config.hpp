// Parsing of the command-line selectors shared by all subcommands.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "discl/energy.hpp"
#include "discl/lattice.hpp"
#include "discl/solver.hpp"

namespace discl {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// `5` -> 2 pi / 5, `7` -> 2 pi / 7, `2pi/<k>` or `pi/<k>`, otherwise radians.
double parse_phi(const std::string& text);

/// Tag used in output filenames: `5`, `7`, or the radians value.
std::string phi_tag(const std::string& text);

/// `zero` or `smoothed[:kappa[,delta]]`.
MaterialLaw parse_law(double p, const std::string& psi, bool uniform_weights);

enum class InitKind { LinearDet1, LinearEdge, Fold, File };

struct InitSpec {
  InitKind kind = InitKind::LinearDet1;
  int folds = 0;
  std::filesystem::path file;
};

/// `linear:det1`, `linear:edge`, `fold:<L>`, `file:<path>`.
InitSpec parse_init(const std::string& text);

struct RunConfig {
  std::string subcommand;
  std::string phi_text = "5";
  double phi = 0.0;
  int eps_exp = 3;
  MaterialLaw law;
  InitSpec init;
  NewtonOptions newton;
  std::filesystem::path out_dir = ".";

  /// Throws ConfigError with a single-line message.
  void validate() const;
};

}  // namespace discl
