#include "omcsim/source.hpp"

#include <cmath>

namespace omcsim {

SourceSpec SourceSpec::fock(int n) {
  SourceSpec s;
  s.kind = SourceKind::Fock;
  s.n = n;
  s.validate();
  return s;
}

SourceSpec SourceSpec::coherent(cx beta) {
  SourceSpec s;
  s.kind = SourceKind::Coherent;
  s.beta = beta;
  s.validate();
  return s;
}

void SourceSpec::validate() const {
  if (kind == SourceKind::Fock && n < 0) {
    throw InvalidParameter("SourceSpec: Fock photon number must be >= 0");
  }
  if (kind == SourceKind::Coherent &&
      !(std::isfinite(beta.real()) && std::isfinite(beta.imag()))) {
    throw InvalidParameter("SourceSpec: coherent amplitude must be finite");
  }
}

SourceMoments source_moments(const SourceSpec& s, double gamma, double delta,
                             double t) {
  s.validate();
  if (t < 0) {
    throw InvalidParameter("source_moments: t must be >= 0");
  }
  SourceMoments m;
  const double decay = std::exp(-gamma * t);
  if (s.kind == SourceKind::Fock) {
    m.nc = static_cast<double>(s.n) * decay;
    m.cc = cx(0.0, 0.0);
  } else {
    m.nc = std::norm(s.beta) * decay;
    m.cc = s.beta * s.beta * std::exp(-(cx(0.0, 2.0 * delta) + gamma) * t);
  }
  return m;
}

}  // namespace omcsim
