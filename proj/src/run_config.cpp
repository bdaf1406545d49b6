#include "discl/run_config.hpp"

#include <cmath>
#include <sstream>

namespace discl {

namespace {

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError("cannot parse " + what + " '" + text + "'");
  return v;
}

}  // namespace

double parse_phi(const std::string& text) {
  if (text == "5") return 2.0 * kPi / 5.0;
  if (text == "7") return 2.0 * kPi / 7.0;
  for (const std::string prefix : {"2pi/", "pi/"}) {
    if (text.rfind(prefix, 0) == 0) {
      const double k = parse_number(text.substr(prefix.size()), "phi denominator");
      if (!(k > 0.0)) throw ConfigError("phi denominator must be positive");
      return (prefix == "2pi/" ? 2.0 : 1.0) * kPi / k;
    }
  }
  const double phi = parse_number(text, "phi");
  if (!(phi > 0.0 && phi < 2.0 * kPi)) throw ConfigError("phi must lie in (0, 2 pi)");
  return phi;
}

std::string phi_tag(const std::string& text) {
  std::string tag;
  for (char c : text) tag += (c == '/' ? '_' : c);
  return tag;
}

MaterialLaw parse_law(double p, const std::string& psi, bool uniform_weights) {
  MaterialLaw law;
  law.p = p;
  law.uniform_weights = uniform_weights;
  if (psi == "zero") {
    law.psi = PsiKind::Zero;
  } else if (psi.rfind("smoothed", 0) == 0) {
    law.psi = PsiKind::SmoothedAbs;
    const std::string rest = psi.substr(std::string("smoothed").size());
    if (!rest.empty()) {
      if (rest[0] != ':') throw ConfigError("psi must be 'zero' or 'smoothed[:kappa[,delta]]'");
      const std::string params = rest.substr(1);
      const auto comma = params.find(',');
      law.kappa = parse_number(params.substr(0, comma), "kappa");
      if (comma != std::string::npos) law.delta = parse_number(params.substr(comma + 1), "delta");
    }
  } else {
    throw ConfigError("psi must be 'zero' or 'smoothed[:kappa[,delta]]'");
  }
  try {
    law.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return law;
}

InitSpec parse_init(const std::string& text) {
  InitSpec spec;
  if (text == "linear:det1") {
    spec.kind = InitKind::LinearDet1;
  } else if (text == "linear:edge") {
    spec.kind = InitKind::LinearEdge;
  } else if (text.rfind("fold:", 0) == 0) {
    spec.kind = InitKind::Fold;
    const double l = parse_number(text.substr(5), "fold count");
    if (l != std::floor(l) || l < 0.0) throw ConfigError("fold count must be a nonnegative integer");
    spec.folds = static_cast<int>(l);
  } else if (text.rfind("file:", 0) == 0 && text.size() > 5) {
    spec.kind = InitKind::File;
    spec.file = text.substr(5);
  } else {
    throw ConfigError("init must be linear:det1, linear:edge, fold:<L> or file:<path>");
  }
  return spec;
}

void RunConfig::validate() const {
  if (eps_exp < 1 || eps_exp > 12) throw ConfigError("eps exponent must lie in [1, 12]");
  if (init.kind == InitKind::Fold && init.folds > (1 << eps_exp) - 1) {
    std::ostringstream msg;
    msg << "fold count " << init.folds << " needs at least " << init.folds + 1 << " subdivisions";
    throw ConfigError(msg.str());
  }
  if (init.kind == InitKind::LinearDet1 && !(std::sin(phi) > 0.0)) {
    throw ConfigError("det-1 linear init needs phi in (0, pi)");
  }
  try {
    law.validate();
    newton.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace discl
