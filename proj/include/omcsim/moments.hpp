#pragma once

#include <array>
#include <span>
#include <vector>

#include "omcsim/dopri5.hpp"
#include "omcsim/drift.hpp"
#include "omcsim/source.hpp"

namespace omcsim {

// The dynamics closes on 14 complex moments: 10 independent entries of the
// correlation matrix (conjugate-redundant entries are reconstructed on
// output) plus the 4 source-system cross moments. See docs/moment-equations.md
// for the entry-by-entry derivation from the master equation.
inline constexpr int n_corr = 10;
inline constexpr int n_noise = 4;
inline constexpr int n_track = n_corr + n_noise;

enum MomentIndex : int {
  m_aa = 0,  // <aa>
  m_aad,     // <a a†>
  m_ada,     // <a†a>
  m_ab,      // <ab>
  m_abd,     // <a b†>
  m_adb,     // <a†b>
  m_adbd,    // <a†b†>
  m_bb,      // <bb>
  m_bbd,     // <b b†>
  m_bdb,     // <b†b>
  m_ac,      // <ac>
  m_adc,     // <a†c>
  m_bc,      // <bc>
  m_bdc,     // <b†c>
};

// Second moments of the system modes, entry (j,k) = <A_j A_k> in written
// operator order with A = (a, a†, b, b†).
struct CorrelationMatrix {
  Mat4c c = Mat4c::Zero();

  static CorrelationMatrix vacuum();
  // 10 tracked entries <-> full matrix
  std::array<cx, n_corr> reduced() const;
  static CorrelationMatrix from_reduced(const std::array<cx, n_corr>& r);

  // max deviation of the conjugation pairs <a†a†>=<aa>*, <a†b†>=<ab>*, ...
  double conjugation_residue() const;
  // max |(<a a†> - <a†a>) - 1| and the same for mode b
  double commutator_residue() const;
};

struct NoiseVector {
  cx ac{0, 0}, adc{0, 0}, bc{0, 0}, bdc{0, 0};
};

struct MomentState {
  double time = 0;
  CorrelationMatrix corr;
  NoiseVector noise;
  SourceMoments source;
};

struct Observables {
  double n_a;        // Re <a†a>
  double n_b;        // Re <b†b>
  double re_cross;   // Re <a†c + c†a>
  double imag_residue;  // max |Im| of the occupations, diagnostics only
};

// Threshold above which observables() flags its imag_residue. Residues past
// this level indicate a bug in the conjugation reduction, not physics.
inline constexpr double imag_residue_warn = 1e-8;

Observables observables(const MomentState& st);

// Time derivative of the 14 tracked moments; the canonical statement of the
// model, everything else (drift assembly, steady state) is derived from it.
std::array<cx, n_track> moment_rhs(const SimParams& p,
                                   const std::array<cx, n_track>& x,
                                   const SourceMoments& s);

// The moment equations written as dx/dt = M x + d(t) over the 28 stacked
// real degrees of freedom [Re x_0..x_13, Im x_0..x_13]. d(t) carries the
// constant dissipator terms plus the sqrt(gamma kappa)-weighted closed-form
// source moments.
struct AffineSystem {
  SimParams params;
  SourceSpec source;
  Eigen::MatrixXd m;        // 28 x 28
  Eigen::VectorXd d_const;  // 28

  Eigen::VectorXd forcing(double t) const;
  void rhs(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) const;

  static Eigen::VectorXd pack(const MomentState& st);
  MomentState unpack(double t, const Eigen::VectorXd& x) const;
};

AffineSystem assemble_affine_system(const SimParams& p, const SourceSpec& s);

struct SolverOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double fixed_dt = 0.0;  // > 0: fixed-step (reproducibility) mode
};

// Adaptive integration from init.time to t_end with dense output at the
// requested sample times (must be non-decreasing, within [init.time, t_end]).
std::vector<MomentState> integrate(const AffineSystem& sys,
                                   const MomentState& init, double t_end,
                                   std::span<const double> sample_times,
                                   const SolverOptions& opt = {});

// Uniform sampling convenience (samples >= 2, includes both endpoints).
std::vector<MomentState> integrate(const AffineSystem& sys,
                                   const MomentState& init, double t_end,
                                   int samples, const SolverOptions& opt = {});

// Unique fixed point of the source-decoupled (gamma = 0) moment system with
// the thermal occupation overridden by nbar. Requires a strictly stable
// drift; otherwise raises SolverError.
CorrelationMatrix steady_state(const SimParams& p, double nbar);

}  // namespace omcsim
