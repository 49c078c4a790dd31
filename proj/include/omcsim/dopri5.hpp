#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <span>

#include "omcsim/params.hpp"

namespace omcsim {

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double fixed_dt = 0.0;    // > 0 switches to fixed-step mode
  double initial_dt = 0.0;  // 0 = choose automatically
  long max_steps = 200000000;
};

// Explicit embedded Runge-Kutta 5(4) (Dormand-Prince) with the classic
// 4th-order dense-output interpolant. Works on flat real state vectors;
// complex systems are integrated through their re/im parts.
//
//   rhs(t, y, dydt)            right-hand side
//   on_sample(i, t, y)         called for every requested sample time, in order
//   post_step(y)               optional hook applied after each accepted step
//
// Sample times must be non-decreasing and lie within [t0, t1]. Local error
// is controlled against abs_tol + rel_tol*max(|y0|,|y1|) per component; a
// step-size underflow raises SolverError naming the failing time.
class Dopri5 {
 public:
  using Vec = Eigen::VectorXd;
  using Rhs = std::function<void(double, const Vec&, Vec&)>;
  using Sample = std::function<void(std::size_t, double, const Vec&)>;
  using PostStep = std::function<void(Vec&)>;

  Dopri5(Rhs rhs, IntegratorOptions opt) : f_(std::move(rhs)), opt_(opt) {}

  void run(Vec& y, double t0, double t1, std::span<const double> samples,
           const Sample& on_sample, const PostStep& post_step = {}) {
    const int n = static_cast<int>(y.size());
    for (auto& k : k_) k.resize(n);
    ytmp_.resize(n);
    y_new_.resize(n);
    rc1_.resize(n); rc2_.resize(n); rc3_.resize(n); rc4_.resize(n); rc5_.resize(n);

    std::size_t is = 0;
    while (is < samples.size() && samples[is] <= t0) {
      if (on_sample) on_sample(is, samples[is], y);
      ++is;
    }
    if (t1 <= t0) return;

    double t = t0;
    f_(t, y, k_[0]);  // FSAL seed
    double h = pick_initial_step(t, y);

    long steps = 0;
    while (t < t1) {
      if (++steps > opt_.max_steps) {
        throw SolverError("integrator exceeded max_steps at t = " +
                          std::to_string(t));
      }
      const bool fixed = opt_.fixed_dt > 0;
      if (h > t1 - t) h = t1 - t;
      if (h < 4 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
        char msg[128];
        std::snprintf(msg, sizeof(msg),
                      "step size underflow (stiffness) at t = %.12g", t);
        throw SolverError(msg);
      }

      const double err = attempt_step(t, y, h);
      if (!fixed && err > 1.0) {
        h *= std::max(0.2, safety_ * std::pow(err, -0.2));
        continue;
      }

      // accepted: dense-output coefficients for this interval
      prepare_dense(y, h);
      const double t_new = t + h;
      while (is < samples.size() && samples[is] <= t_new + 1e-14 * std::max(1.0, std::abs(t_new))) {
        const double theta = std::clamp((samples[is] - t) / h, 0.0, 1.0);
        interpolate(theta, ytmp_);
        if (on_sample) on_sample(is, samples[is], ytmp_);
        ++is;
      }

      y.swap(y_new_);
      t = t_new;
      if (post_step) {
        post_step(y);
        f_(t, y, k_[0]);  // FSAL invalidated by the hook
      } else {
        k_[0].swap(k_[6]);
      }
      if (!fixed) {
        h *= std::clamp(safety_ * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      } else {
        h = opt_.fixed_dt;
      }
    }
    // guard against samples dropped by roundoff at t1
    while (is < samples.size()) {
      if (on_sample) on_sample(is, samples[is], y);
      ++is;
    }
  }

 private:
  // Butcher tableau (Dormand & Prince 1980)
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b_hat, the embedded 4th-order error weights
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  // dense-output weights
  static constexpr double d1 = -12715105075.0 / 11282082432.0,
                          d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0,
                          d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0,
                          d7 = 69997945.0 / 29380423.0;
  static constexpr double safety_ = 0.9;

  double attempt_step(double t, const Vec& y, double h) {
    ytmp_ = y + h * a21 * k_[0];
    f_(t + c2 * h, ytmp_, k_[1]);
    ytmp_ = y + h * (a31 * k_[0] + a32 * k_[1]);
    f_(t + c3 * h, ytmp_, k_[2]);
    ytmp_ = y + h * (a41 * k_[0] + a42 * k_[1] + a43 * k_[2]);
    f_(t + c4 * h, ytmp_, k_[3]);
    ytmp_ = y + h * (a51 * k_[0] + a52 * k_[1] + a53 * k_[2] + a54 * k_[3]);
    f_(t + c5 * h, ytmp_, k_[4]);
    ytmp_ = y + h * (a61 * k_[0] + a62 * k_[1] + a63 * k_[2] + a64 * k_[3] +
                     a65 * k_[4]);
    f_(t + h, ytmp_, k_[5]);
    y_new_ = y + h * (b1 * k_[0] + b3 * k_[2] + b4 * k_[3] + b5 * k_[4] +
                      b6 * k_[5]);
    f_(t + h, y_new_, k_[6]);

    // scaled RMS error of the embedded difference
    double acc = 0;
    const int n = static_cast<int>(y.size());
    for (int i = 0; i < n; ++i) {
      const double ei = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                             e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
      const double sc = opt_.abs_tol +
                        opt_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      acc += (ei / sc) * (ei / sc);
    }
    return std::sqrt(acc / n);
  }

  void prepare_dense(const Vec& y, double h) {
    rc1_ = y;
    rc2_ = y_new_ - y;
    rc3_ = h * k_[0] - rc2_;
    rc4_ = rc2_ - h * k_[6] - rc3_;
    rc5_ = h * (d1 * k_[0] + d3 * k_[2] + d4 * k_[3] + d5 * k_[4] +
                d6 * k_[5] + d7 * k_[6]);
  }

  void interpolate(double theta, Vec& out) const {
    const double th1 = 1.0 - theta;
    out = rc1_ +
          theta * (rc2_ + th1 * (rc3_ + theta * (rc4_ + th1 * rc5_)));
  }

  double pick_initial_step(double t, const Vec& y) {
    if (opt_.fixed_dt > 0) return opt_.fixed_dt;
    if (opt_.initial_dt > 0) return opt_.initial_dt;
    // crude h0 from the first derivative scale, then bounded
    const double d0 = y.norm();
    const double d1n = k_[0].norm();
    double h0 = (d0 > 1e-10 && d1n > 1e-10) ? 0.01 * d0 / d1n : 1e-6;
    (void)t;
    return std::min(h0, 0.1);
  }

  Rhs f_;
  IntegratorOptions opt_;
  Vec k_[7];
  Vec ytmp_, y_new_;
  Vec rc1_, rc2_, rc3_, rc4_, rc5_;
};

}  // namespace omcsim
