#pragma once

#include "omcsim/params.hpp"

namespace omcsim {

enum class SourceKind { Fock, Coherent };

// Initial state of the single-photon source cavity.
struct SourceSpec {
  SourceKind kind = SourceKind::Fock;
  int n = 0;        // Fock photon number
  cx beta{0.0, 0.0};  // coherent amplitude

  static SourceSpec fock(int n);
  static SourceSpec coherent(cx beta);
  void validate() const;
};

// Second moments of the source mode at a given time.
struct SourceMoments {
  cx cc{0.0, 0.0};  // <c²>
  double nc = 0.0;  // <c†c>
};

// Closed-form source evolution: the source cavity decays freely, so
//   Fock(n):       <c†c> = n e^{-gamma t},        <c²> = 0,
//   Coherent(beta): <c†c> = |beta|² e^{-gamma t}, <c²> = beta² e^{-(2i delta + gamma) t}.
SourceMoments source_moments(const SourceSpec& s, double gamma, double delta,
                             double t);

}  // namespace omcsim
