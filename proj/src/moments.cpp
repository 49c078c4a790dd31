#include "omcsim/moments.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace omcsim {

CorrelationMatrix CorrelationMatrix::vacuum() {
  CorrelationMatrix m;
  m.c(0, 1) = 1.0;  // <a a†>
  m.c(2, 3) = 1.0;  // <b b†>
  return m;
}

std::array<cx, n_corr> CorrelationMatrix::reduced() const {
  return {c(0, 0), c(0, 1), c(1, 0), c(0, 2), c(0, 3),
          c(1, 2), c(1, 3), c(2, 2), c(2, 3), c(3, 2)};
}

CorrelationMatrix CorrelationMatrix::from_reduced(
    const std::array<cx, n_corr>& r) {
  CorrelationMatrix m;
  auto& c = m.c;
  c(0, 0) = r[m_aa];
  c(0, 1) = r[m_aad];
  c(0, 2) = r[m_ab];
  c(0, 3) = r[m_abd];
  c(1, 0) = r[m_ada];
  c(1, 1) = std::conj(r[m_aa]);
  c(1, 2) = r[m_adb];
  c(1, 3) = r[m_adbd];
  c(2, 0) = r[m_ab];  // modes commute: <ba> = <ab>
  c(2, 1) = r[m_adb];
  c(2, 2) = r[m_bb];
  c(2, 3) = r[m_bbd];
  c(3, 0) = r[m_abd];
  c(3, 1) = r[m_adbd];
  c(3, 2) = r[m_bdb];
  c(3, 3) = std::conj(r[m_bb]);
  return m;
}

double CorrelationMatrix::conjugation_residue() const {
  double m = 0;
  m = std::max(m, std::abs(c(1, 1) - std::conj(c(0, 0))));  // <a†a†> = <aa>*
  m = std::max(m, std::abs(c(3, 3) - std::conj(c(2, 2))));  // <b†b†> = <bb>*
  m = std::max(m, std::abs(c(1, 3) - std::conj(c(0, 2))));  // <a†b†> = <ab>*
  m = std::max(m, std::abs(c(1, 2) - std::conj(c(0, 3))));  // <a†b> = <a b†>*
  return m;
}

double CorrelationMatrix::commutator_residue() const {
  return std::max(std::abs(c(0, 1) - c(1, 0) - 1.0),
                  std::abs(c(2, 3) - c(3, 2) - 1.0));
}

Observables observables(const MomentState& st) {
  Observables o;
  o.n_a = st.corr.c(1, 0).real();
  o.n_b = st.corr.c(3, 2).real();
  o.re_cross = 2.0 * st.noise.adc.real();  // <a†c + c†a> is self-adjoint
  o.imag_residue = std::max(std::abs(st.corr.c(1, 0).imag()),
                            std::abs(st.corr.c(3, 2).imag()));
  return o;
}

std::array<cx, n_track> moment_rhs(const SimParams& p,
                                   const std::array<cx, n_track>& x,
                                   const SourceMoments& s) {
  const auto dr = DerivedRates::from(p);
  const cx ig(0.0, p.g);
  const cx rot = ig;                         // from a b† + a† b
  const cx cnt = p.rwa ? cx(0, 0) : ig;      // from a b + a† b†, off under rwa
  const double r = std::sqrt(p.gamma * p.kappa);
  const cx kt = dr.kappa_t, mt = dr.mu_t;

  const cx aa = x[m_aa], aad = x[m_aad], ada = x[m_ada];
  const cx ab = x[m_ab], abd = x[m_abd], adb = x[m_adb], adbd = x[m_adbd];
  const cx bb = x[m_bb], bbd = x[m_bbd], bdb = x[m_bdb];
  const cx ac = x[m_ac], adc = x[m_adc], bc = x[m_bc], bdc = x[m_bdc];

  std::array<cx, n_track> dx;
  dx[m_aa] = -2.0 * kt * aa - 2.0 * (rot * ab + cnt * abd) - 2.0 * r * ac;
  dx[m_aad] = (cnt * ab + rot * abd - rot * adb - cnt * adbd) -
              p.kappa * aad + p.kappa - r * (adc + std::conj(adc));
  dx[m_ada] = (cnt * ab + rot * abd - rot * adb - cnt * adbd) -
              p.kappa * ada - r * (adc + std::conj(adc));
  dx[m_ab] = -(kt + mt) * ab - (rot * aa + cnt * aad + rot * bb + cnt * bdb) -
             r * bc;
  dx[m_abd] = -(kt + std::conj(mt)) * abd + (cnt * aa + rot * aad) -
              (rot * bbd + cnt * std::conj(bb)) - r * bdc;
  dx[m_adb] = -(std::conj(kt) + mt) * adb -
              (rot * ada + cnt * std::conj(aa)) + (cnt * bb + rot * bdb) -
              r * std::conj(bdc);
  dx[m_adbd] = -(std::conj(kt) + std::conj(mt)) * adbd +
               (cnt * ada + rot * std::conj(aa) + cnt * bbd +
                rot * std::conj(bb)) -
               r * std::conj(bc);
  dx[m_bb] = -2.0 * mt * bb - 2.0 * (rot * ab + cnt * adb);
  dx[m_bbd] = (cnt * ab + rot * adb - rot * abd - cnt * adbd) - p.mu * bbd +
              p.mu * (p.nbar + 1.0);
  dx[m_bdb] = (cnt * ab + rot * adb - rot * abd - cnt * adbd) - p.mu * bdb +
              p.mu * p.nbar;

  // cross-moment block; the full coupling pattern is kept here regardless of
  // the rwa flag (the flag switches only the opto-mechanical block above)
  dx[m_ac] = -dr.sigma * ac - ig * (bc + bdc) - r * s.cc;
  dx[m_adc] = -(p.kappa + p.gamma) / 2.0 * adc + ig * (bc + bdc) - r * s.nc;
  dx[m_bc] = -dr.tau_plus * bc - ig * (ac + adc);
  dx[m_bdc] = -std::conj(dr.tau_minus) * bdc + ig * (ac + adc);
  return dx;
}

namespace {

// basis-probe the affine map x -> moment_rhs(x, 0): exact because the map is
// affine over the stacked real parts
void probe_linear_part(const SimParams& p, Eigen::MatrixXd& m,
                       Eigen::VectorXd& d0) {
  const SourceMoments zero_src{};
  std::array<cx, n_track> zero{};
  const auto f0 = moment_rhs(p, zero, zero_src);
  m.resize(2 * n_track, 2 * n_track);
  d0.resize(2 * n_track);
  for (int k = 0; k < n_track; ++k) {
    d0[k] = f0[k].real();
    d0[n_track + k] = f0[k].imag();
  }
  for (int k = 0; k < n_track; ++k) {
    for (int part = 0; part < 2; ++part) {
      std::array<cx, n_track> e{};
      e[k] = part == 0 ? cx(1, 0) : cx(0, 1);
      const auto fe = moment_rhs(p, e, zero_src);
      const int col = k + part * n_track;
      for (int j = 0; j < n_track; ++j) {
        m(j, col) = fe[j].real() - f0[j].real();
        m(n_track + j, col) = fe[j].imag() - f0[j].imag();
      }
    }
  }
}

}  // namespace

AffineSystem assemble_affine_system(const SimParams& p, const SourceSpec& s) {
  p.validate();
  s.validate();
  AffineSystem sys;
  sys.params = p;
  sys.source = s;
  probe_linear_part(p, sys.m, sys.d_const);
  return sys;
}

Eigen::VectorXd AffineSystem::forcing(double t) const {
  Eigen::VectorXd d = d_const;
  const double r = std::sqrt(params.gamma * params.kappa);
  if (r > 0) {
    const SourceMoments s = source_moments(source, params.gamma, params.delta, t);
    d[m_ac] += -r * s.cc.real();
    d[n_track + m_ac] += -r * s.cc.imag();
    d[m_adc] += -r * s.nc;
  }
  return d;
}

void AffineSystem::rhs(double t, const Eigen::VectorXd& x,
                       Eigen::VectorXd& dx) const {
  dx.noalias() = m * x;
  dx += forcing(t);
}

Eigen::VectorXd AffineSystem::pack(const MomentState& st) {
  const auto corr = st.corr.reduced();
  Eigen::VectorXd x(2 * n_track);
  const std::array<cx, n_noise> noise{st.noise.ac, st.noise.adc, st.noise.bc,
                                      st.noise.bdc};
  for (int k = 0; k < n_corr; ++k) {
    x[k] = corr[k].real();
    x[n_track + k] = corr[k].imag();
  }
  for (int k = 0; k < n_noise; ++k) {
    x[n_corr + k] = noise[k].real();
    x[n_track + n_corr + k] = noise[k].imag();
  }
  return x;
}

MomentState AffineSystem::unpack(double t, const Eigen::VectorXd& x) const {
  MomentState st;
  st.time = t;
  std::array<cx, n_corr> corr;
  for (int k = 0; k < n_corr; ++k) corr[k] = cx(x[k], x[n_track + k]);
  st.corr = CorrelationMatrix::from_reduced(corr);
  st.noise.ac = cx(x[n_corr + 0], x[n_track + n_corr + 0]);
  st.noise.adc = cx(x[n_corr + 1], x[n_track + n_corr + 1]);
  st.noise.bc = cx(x[n_corr + 2], x[n_track + n_corr + 2]);
  st.noise.bdc = cx(x[n_corr + 3], x[n_track + n_corr + 3]);
  st.source = source_moments(source, params.gamma, params.delta, t);
  return st;
}

std::vector<MomentState> integrate(const AffineSystem& sys,
                                   const MomentState& init, double t_end,
                                   std::span<const double> sample_times,
                                   const SolverOptions& opt) {
  if (!(t_end > init.time)) {
    throw InvalidParameter("integrate: t_end must exceed init.time");
  }
  if (!(opt.rel_tol > 0) || !(opt.abs_tol > 0)) {
    throw InvalidParameter("integrate: tolerances must be > 0");
  }

  IntegratorOptions iopt;
  iopt.rel_tol = opt.rel_tol;
  iopt.abs_tol = opt.abs_tol;
  iopt.fixed_dt = opt.fixed_dt;

  std::vector<MomentState> out(sample_times.size());
  Eigen::VectorXd y = AffineSystem::pack(init);
  Dopri5 stepper(
      [&sys](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
        sys.rhs(t, x, dx);
      },
      iopt);
  stepper.run(y, init.time, t_end, sample_times,
              [&](std::size_t i, double t, const Eigen::VectorXd& xs) {
                out[i] = sys.unpack(t, xs);
              });
  return out;
}

std::vector<MomentState> integrate(const AffineSystem& sys,
                                   const MomentState& init, double t_end,
                                   int samples, const SolverOptions& opt) {
  if (samples < 2) throw InvalidParameter("integrate: samples must be >= 2");
  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) {
    times[i] = init.time + (t_end - init.time) * i / (samples - 1);
  }
  return integrate(sys, init, t_end,
                   std::span<const double>(times.data(), times.size()), opt);
}

CorrelationMatrix steady_state(const SimParams& p, double nbar) {
  SimParams q = p;
  q.gamma = 0.0;  // source decoupled during the preparation phase
  q.nbar = nbar;
  q.validate();

  // strict stability of the first-moment drift <=> stability of the moment
  // system (its rates are pairwise sums of drift eigenvalues)
  const DriftMatrix k = build_drift_matrix(q);
  Eigen::ComplexEigenSolver<Mat4c> es(k);
  for (int i = 0; i < 4; ++i) {
    if (!(es.eigenvalues()[i].real() < 0)) {
      throw SolverError(
          "steady_state: drift matrix is not strictly stable, no steady "
          "state exists");
    }
  }

  Eigen::MatrixXd m;
  Eigen::VectorXd d0;
  probe_linear_part(q, m, d0);

  // with gamma = 0 the cross-moment block decouples; solve the correlation
  // block only (real/imag parts of the 10 tracked entries)
  std::vector<int> idx;
  for (int k2 = 0; k2 < n_corr; ++k2) idx.push_back(k2);
  for (int k2 = 0; k2 < n_corr; ++k2) idx.push_back(n_track + k2);
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXd mc(n, n);
  Eigen::VectorXd dc(n);
  for (int i = 0; i < n; ++i) {
    dc[i] = d0[idx[i]];
    for (int j = 0; j < n; ++j) mc(i, j) = m(idx[i], idx[j]);
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(mc);
  if (!lu.isInvertible()) {
    throw SolverError("steady_state: singular moment drift");
  }
  const Eigen::VectorXd x = lu.solve(-dc);

  std::array<cx, n_corr> corr;
  for (int k2 = 0; k2 < n_corr; ++k2) corr[k2] = cx(x[k2], x[n_corr + k2]);
  return CorrelationMatrix::from_reduced(corr);
}

}  // namespace omcsim
