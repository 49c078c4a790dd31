#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "omcsim/dopri5.hpp"
#include "omcsim/moments.hpp"
#include "omcsim/params.hpp"
#include "omcsim/source.hpp"

namespace omcsim {

using SpMatC = Eigen::SparseMatrix<cx>;

// Per-mode Fock cutoffs (highest retained number state).
struct TruncationSpec {
  int n_a_max = 1;
  int n_b_max = 1;
  int n_c_max = 1;
  long dim_limit = 20000;

  long dim() const {
    return static_cast<long>(n_a_max + 1) * (n_b_max + 1) * (n_c_max + 1);
  }
  // basis index, mode c fastest-varying
  long index(int ia, int ib, int ic) const {
    return (static_cast<long>(ia) * (n_b_max + 1) + ib) * (n_c_max + 1) + ic;
  }
  void validate() const;
};

// Three-mode density matrix on the truncated product basis (a, b, c).
struct DensityMatrix {
  TruncationSpec tr;
  Eigen::MatrixXcd rho;

  double trace_residue() const;      // |tr(rho) - 1|
  double hermiticity_residue() const;
  double min_eigenvalue() const;     // full spectrum, for spot checks

  static DensityMatrix basis_state(const TruncationSpec& tr, int ia, int ib,
                                   int ic);
  // vacuum (a) x thermal-or-vacuum (b) x source state (c)
  static DensityMatrix product_state(const TruncationSpec& tr,
                                     const SourceSpec& src,
                                     double nbar_b = 0.0);
};

// Smallest cutoff such that the Poisson tail of |beta> above it is < tail.
int coherent_cutoff(cx beta, double tail = 1e-6);

enum class FockObservable {
  n_a, n_b, n_c,
  aa, aad, ada, ab, abd, adb, adbd, bb, bbd, bdb,
  ac, adc, bc, bdc, cc, cdc,
};

FockObservable parse_observable(std::string_view tag);

// Generator of the cascaded master equation on the truncated space. The
// action is  rho' = A rho + rho A† + sum_k X_k rho Y_k  with the coherent
// drift and half the decay terms folded into A. For small spaces the whole
// map is materialized as a sparse matrix over vec(rho); above the dimension
// threshold it is applied term by term on the density matrix directly.
class Liouvillian {
 public:
  Liouvillian(const SimParams& p, const TruncationSpec& tr);

  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) const;

  const TruncationSpec& truncation() const { return tr_; }
  const SimParams& params() const { return params_; }
  bool materialized() const { return use_super_; }

  // largest Hilbert-space dimension for which vec(rho) superoperator
  // application is used
  static constexpr long super_dim_limit = 2000;

 private:
  TruncationSpec tr_;
  SimParams params_;
  SpMatC drift_;  // A
  SpMatC drift_adj_;
  std::vector<std::pair<SpMatC, SpMatC>> sandwich_;  // weight folded into first
  SpMatC super_;
  bool use_super_ = false;
};

Liouvillian build_liouvillian(const SimParams& p, const TruncationSpec& tr);

// Evolve rho0 and call on_sample at every requested grid time (grid must be
// non-decreasing, starting at or after 0). The state is re-Hermitized after
// every accepted step; a population dropping below -pos_tol raises
// TruncationError.
void evolve_rho(
    const Liouvillian& gen, const DensityMatrix& rho0,
    std::span<const double> t_grid,
    const std::function<void(std::size_t, double, const DensityMatrix&)>&
        on_sample,
    const IntegratorOptions& opt = {}, double pos_tol = 1e-4);

// Convenience wrapper storing the sampled states.
std::vector<DensityMatrix> evolve_rho(const Liouvillian& gen,
                                      const DensityMatrix& rho0,
                                      std::span<const double> t_grid,
                                      const IntegratorOptions& opt = {},
                                      double pos_tol = 1e-4);

cx expectation(const DensityMatrix& rho, FockObservable which);

struct Leakage {
  double a, b, c;  // population of the highest retained level per mode
  double max() const { return std::max(a, std::max(b, c)); }
};

Leakage leakage(const DensityMatrix& rho);

// System/source moments of a Fock-space state in the layout of MomentState
// (for direct comparison with the moment solver).
MomentState moments_from_density(const DensityMatrix& rho, double time = 0.0);

}  // namespace omcsim
