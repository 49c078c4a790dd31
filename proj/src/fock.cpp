#include "omcsim/fock.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

namespace omcsim {

void TruncationSpec::validate() const {
  if (n_a_max < 1 || n_b_max < 1 || n_c_max < 1) {
    throw InvalidParameter("TruncationSpec: every cutoff must be >= 1");
  }
  if (dim() > dim_limit) {
    throw InvalidParameter("TruncationSpec: dimension " +
                           std::to_string(dim()) + " exceeds limit " +
                           std::to_string(dim_limit));
  }
}

namespace {

enum Mode { mode_a = 0, mode_b = 1, mode_c = 2 };

// annihilation operator of one mode on the product basis
SpMatC destroy(const TruncationSpec& tr, Mode mode) {
  const long d = tr.dim();
  std::vector<Eigen::Triplet<cx>> trips;
  trips.reserve(d);
  for (int ia = 0; ia <= tr.n_a_max; ++ia) {
    for (int ib = 0; ib <= tr.n_b_max; ++ib) {
      for (int ic = 0; ic <= tr.n_c_max; ++ic) {
        int n = mode == mode_a ? ia : (mode == mode_b ? ib : ic);
        if (n == 0) continue;
        const long col = tr.index(ia, ib, ic);
        const long row = mode == mode_a   ? tr.index(ia - 1, ib, ic)
                         : mode == mode_b ? tr.index(ia, ib - 1, ic)
                                          : tr.index(ia, ib, ic - 1);
        trips.emplace_back(row, col, cx(std::sqrt(double(n)), 0.0));
      }
    }
  }
  SpMatC m(d, d);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

SpMatC sparse_kron(const SpMatC& p, const SpMatC& q) {
  std::vector<Eigen::Triplet<cx>> trips;
  trips.reserve(static_cast<std::size_t>(p.nonZeros()) * q.nonZeros());
  for (int kp = 0; kp < p.outerSize(); ++kp) {
    for (SpMatC::InnerIterator itp(p, kp); itp; ++itp) {
      for (int kq = 0; kq < q.outerSize(); ++kq) {
        for (SpMatC::InnerIterator itq(q, kq); itq; ++itq) {
          trips.emplace_back(itp.row() * q.rows() + itq.row(),
                             itp.col() * q.cols() + itq.col(),
                             itp.value() * itq.value());
        }
      }
    }
  }
  SpMatC out(p.rows() * q.rows(), p.cols() * q.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMatC sparse_identity(long d) {
  SpMatC i(d, d);
  i.setIdentity();
  return i;
}

}  // namespace

Liouvillian::Liouvillian(const SimParams& p, const TruncationSpec& tr)
    : tr_(tr), params_(p) {
  p.validate();
  tr.validate();
  const long d = tr.dim();
  const cx i1(0.0, 1.0);

  const SpMatC a = destroy(tr, mode_a);
  const SpMatC b = destroy(tr, mode_b);
  const SpMatC c = destroy(tr, mode_c);
  const SpMatC ad = SpMatC(a.adjoint());
  const SpMatC bd = SpMatC(b.adjoint());
  const SpMatC cd = SpMatC(c.adjoint());

  SpMatC h = p.delta * SpMatC(ad * a) + p.omega_m * SpMatC(bd * b) +
             p.delta * SpMatC(cd * c);
  if (p.rwa) {
    h += p.g * SpMatC(a * bd + ad * b);
  } else {
    h += p.g * SpMatC(SpMatC(a + ad) * SpMatC(b + bd));
  }

  const double r = std::sqrt(p.gamma * p.kappa);
  drift_ = SpMatC(-i1 * h) -
           0.5 * (p.kappa * SpMatC(ad * a) + p.gamma * SpMatC(cd * c) +
                  p.mu * (p.nbar + 1) * SpMatC(bd * b) +
                  p.mu * p.nbar * SpMatC(b * bd)) -
           r * SpMatC(ad * c);
  drift_adj_ = SpMatC(drift_.adjoint());

  sandwich_.clear();
  auto add = [&](double w, const SpMatC& x, const SpMatC& y) {
    if (w != 0.0) sandwich_.emplace_back(SpMatC(w * x), y);
  };
  add(p.kappa, a, ad);
  add(p.gamma, c, cd);
  add(p.mu * (p.nbar + 1), b, bd);
  add(p.mu * p.nbar, bd, b);
  add(r, c, ad);
  add(r, a, cd);

  use_super_ = d <= super_dim_limit;
  if (use_super_) {
    // column-major vec: vec(X rho Y) = (Y^T kron X) vec(rho)
    const SpMatC id = sparse_identity(d);
    super_ = sparse_kron(id, drift_) +
             sparse_kron(SpMatC(drift_adj_.transpose()), id);
    for (const auto& [x, y] : sandwich_) {
      super_ += sparse_kron(SpMatC(y.transpose()), x);
    }
    super_.makeCompressed();
  }
}

void Liouvillian::apply(const Eigen::MatrixXcd& rho,
                        Eigen::MatrixXcd& out) const {
  const long d = tr_.dim();
  if (use_super_) {
    Eigen::Map<const Eigen::VectorXcd> vin(rho.data(), d * d);
    out.resize(d, d);
    Eigen::Map<Eigen::VectorXcd> vout(out.data(), d * d);
    vout.noalias() = super_ * vin;
    return;
  }
  out.noalias() = drift_ * rho;
  out.noalias() += rho * drift_adj_;
  for (const auto& [x, y] : sandwich_) {
    out.noalias() += x * (rho * y);
  }
}

Liouvillian build_liouvillian(const SimParams& p, const TruncationSpec& tr) {
  return Liouvillian(p, tr);
}

void evolve_rho(
    const Liouvillian& gen, const DensityMatrix& rho0,
    std::span<const double> t_grid,
    const std::function<void(std::size_t, double, const DensityMatrix&)>&
        on_sample,
    const IntegratorOptions& opt, double pos_tol) {
  const long d = gen.truncation().dim();
  if (rho0.rho.rows() != d || rho0.rho.cols() != d) {
    throw InvalidParameter("evolve_rho: state dimension mismatch");
  }
  if (t_grid.empty()) return;

  // integrate over the re/im view of the matrix entries
  Eigen::VectorXd y(2 * d * d);
  Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<cx*>(y.data()), d, d) =
      rho0.rho;

  Eigen::MatrixXcd work(d, d);
  auto rhs = [&](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    Eigen::Map<const Eigen::MatrixXcd> rho(
        reinterpret_cast<const cx*>(x.data()), d, d);
    gen.apply(rho, work);
    dx.resize(2 * d * d);
    Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<cx*>(dx.data()), d, d) =
        work;
  };

  DensityMatrix sample;
  sample.tr = gen.truncation();
  auto emit = [&](std::size_t i, double t, const Eigen::VectorXd& x) {
    sample.rho =
        Eigen::Map<const Eigen::MatrixXcd>(reinterpret_cast<const cx*>(x.data()), d, d);
    on_sample(i, t, sample);
  };

  auto post = [&](Eigen::VectorXd& x) {
    Eigen::Map<Eigen::MatrixXcd> rho(reinterpret_cast<cx*>(x.data()), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double pmin = rho.diagonal().real().minCoeff();
    if (pmin < -pos_tol) {
      throw TruncationError(
          "evolve_rho: population " + std::to_string(pmin) +
          " below -" + std::to_string(pos_tol) +
          "; raise the Fock cutoffs");
    }
  };

  Dopri5 stepper(rhs, opt);
  Eigen::VectorXd state = y;
  stepper.run(state, 0.0, t_grid.back(), t_grid, emit, post);
}

std::vector<DensityMatrix> evolve_rho(const Liouvillian& gen,
                                      const DensityMatrix& rho0,
                                      std::span<const double> t_grid,
                                      const IntegratorOptions& opt,
                                      double pos_tol) {
  std::vector<DensityMatrix> out(t_grid.size());
  evolve_rho(
      gen, rho0, t_grid,
      [&](std::size_t i, double, const DensityMatrix& s) { out[i] = s; }, opt,
      pos_tol);
  return out;
}

double DensityMatrix::trace_residue() const {
  return std::abs(rho.trace() - cx(1.0, 0.0));
}

double DensityMatrix::hermiticity_residue() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (rho + rho.adjoint()));
  return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::basis_state(const TruncationSpec& tr, int ia,
                                         int ib, int ic) {
  tr.validate();
  if (ia < 0 || ia > tr.n_a_max || ib < 0 || ib > tr.n_b_max || ic < 0 ||
      ic > tr.n_c_max) {
    throw InvalidParameter("basis_state: index outside truncation");
  }
  DensityMatrix m;
  m.tr = tr;
  m.rho = Eigen::MatrixXcd::Zero(tr.dim(), tr.dim());
  m.rho(tr.index(ia, ib, ic), tr.index(ia, ib, ic)) = 1.0;
  return m;
}

DensityMatrix DensityMatrix::product_state(const TruncationSpec& tr,
                                           const SourceSpec& src,
                                           double nbar_b) {
  tr.validate();
  src.validate();

  // per-mode diagonals/kets
  Eigen::VectorXd pb = Eigen::VectorXd::Zero(tr.n_b_max + 1);
  if (nbar_b <= 0) {
    pb[0] = 1.0;
  } else {
    const double q = nbar_b / (nbar_b + 1.0);
    double w = 1.0 / (nbar_b + 1.0);
    for (int n = 0; n <= tr.n_b_max; ++n, w *= q) pb[n] = w;
    pb /= pb.sum();  // renormalize the truncated geometric tail
  }

  Eigen::VectorXcd kc = Eigen::VectorXcd::Zero(tr.n_c_max + 1);
  if (src.kind == SourceKind::Fock) {
    if (src.n > tr.n_c_max) {
      throw InvalidParameter("product_state: Fock n exceeds source cutoff");
    }
    kc[src.n] = 1.0;
  } else {
    double lognorm = -0.5 * std::norm(src.beta);
    for (int n = 0; n <= tr.n_c_max; ++n) {
      double logfact = 0;
      for (int k = 2; k <= n; ++k) logfact += std::log(double(k));
      kc[n] = std::pow(src.beta, n) * std::exp(lognorm - 0.5 * logfact);
    }
    kc /= kc.norm();
  }

  DensityMatrix m;
  m.tr = tr;
  m.rho = Eigen::MatrixXcd::Zero(tr.dim(), tr.dim());
  for (int ib = 0; ib <= tr.n_b_max; ++ib) {
    if (pb[ib] == 0) continue;
    for (int ic = 0; ic <= tr.n_c_max; ++ic) {
      for (int jc = 0; jc <= tr.n_c_max; ++jc) {
        const cx v = pb[ib] * kc[ic] * std::conj(kc[jc]);
        if (v != cx(0, 0)) {
          m.rho(tr.index(0, ib, ic), tr.index(0, ib, jc)) += v;
        }
      }
    }
  }
  return m;
}

int coherent_cutoff(cx beta, double tail) {
  const double mean = std::norm(beta);
  double term = std::exp(-mean);  // P(0)
  double cum = term;
  int n = 0;
  while (1.0 - cum >= tail && n < 10000) {
    ++n;
    term *= mean / n;
    cum += term;
  }
  return std::max(n, 1);
}

FockObservable parse_observable(std::string_view tag) {
  using O = FockObservable;
  if (tag == "n_a" || tag == "na") return O::n_a;
  if (tag == "n_b" || tag == "nb") return O::n_b;
  if (tag == "n_c" || tag == "nc") return O::n_c;
  if (tag == "aa") return O::aa;
  if (tag == "aad") return O::aad;
  if (tag == "ada") return O::ada;
  if (tag == "ab") return O::ab;
  if (tag == "abd") return O::abd;
  if (tag == "adb") return O::adb;
  if (tag == "adbd") return O::adbd;
  if (tag == "bb") return O::bb;
  if (tag == "bbd") return O::bbd;
  if (tag == "bdb") return O::bdb;
  if (tag == "ac") return O::ac;
  if (tag == "adc") return O::adc;
  if (tag == "bc") return O::bc;
  if (tag == "bdc") return O::bdc;
  if (tag == "cc") return O::cc;
  if (tag == "cdc") return O::cdc;
  throw InvalidParameter("unknown observable tag '" + std::string(tag) + "'");
}

cx expectation(const DensityMatrix& rho, FockObservable which) {
  const TruncationSpec& tr = rho.tr;
  const SpMatC a = destroy(tr, mode_a);
  const SpMatC b = destroy(tr, mode_b);
  const SpMatC c = destroy(tr, mode_c);
  using O = FockObservable;
  SpMatC op;
  switch (which) {
    case O::n_a: case O::ada: op = SpMatC(a.adjoint()) * a; break;
    case O::n_b: case O::bdb: op = SpMatC(b.adjoint()) * b; break;
    case O::n_c: case O::cdc: op = SpMatC(c.adjoint()) * c; break;
    case O::aa: op = a * a; break;
    case O::aad: op = a * SpMatC(a.adjoint()); break;
    case O::ab: op = a * b; break;
    case O::abd: op = a * SpMatC(b.adjoint()); break;
    case O::adb: op = SpMatC(a.adjoint()) * b; break;
    case O::adbd: op = SpMatC(a.adjoint()) * SpMatC(b.adjoint()); break;
    case O::bb: op = b * b; break;
    case O::bbd: op = b * SpMatC(b.adjoint()); break;
    case O::ac: op = a * c; break;
    case O::adc: op = SpMatC(a.adjoint()) * c; break;
    case O::bc: op = b * c; break;
    case O::bdc: op = SpMatC(b.adjoint()) * c; break;
    case O::cc: op = c * c; break;
  }
  return (op * rho.rho).trace();
}

Leakage leakage(const DensityMatrix& rho) {
  const TruncationSpec& tr = rho.tr;
  Leakage l{0, 0, 0};
  for (int ia = 0; ia <= tr.n_a_max; ++ia) {
    for (int ib = 0; ib <= tr.n_b_max; ++ib) {
      for (int ic = 0; ic <= tr.n_c_max; ++ic) {
        const double p = rho.rho(tr.index(ia, ib, ic), tr.index(ia, ib, ic)).real();
        if (ia == tr.n_a_max) l.a += p;
        if (ib == tr.n_b_max) l.b += p;
        if (ic == tr.n_c_max) l.c += p;
      }
    }
  }
  return l;
}

MomentState moments_from_density(const DensityMatrix& rho, double time) {
  using O = FockObservable;
  MomentState st;
  st.time = time;
  std::array<cx, n_corr> corr{
      expectation(rho, O::aa),   expectation(rho, O::aad),
      expectation(rho, O::ada),  expectation(rho, O::ab),
      expectation(rho, O::abd),  expectation(rho, O::adb),
      expectation(rho, O::adbd), expectation(rho, O::bb),
      expectation(rho, O::bbd),  expectation(rho, O::bdb)};
  st.corr = CorrelationMatrix::from_reduced(corr);
  st.noise.ac = expectation(rho, O::ac);
  st.noise.adc = expectation(rho, O::adc);
  st.noise.bc = expectation(rho, O::bc);
  st.noise.bdc = expectation(rho, O::bdc);
  st.source.cc = expectation(rho, O::cc);
  st.source.nc = expectation(rho, O::cdc).real();
  return st;
}

}  // namespace omcsim
