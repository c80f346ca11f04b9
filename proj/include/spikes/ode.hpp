#pragma once
#include <Eigen/Dense>
#include <cmath>

#include "spikes/errors.hpp"

namespace spikes {

// Adaptive Dormand-Prince 5(4) for small fixed-size systems. Steps are
// error-controlled against atol + rtol*|y|; integrate_to lands exactly on
// the requested endpoint so callers can sample on their own node grid.
template <int Dim>
class Dopri5 {
 public:
  using Vec = Eigen::Matrix<double, Dim, 1>;

  Dopri5(double atol, double rtol) : atol_(atol), rtol_(rtol) {}

  void start(double t, const Vec& y, double h0) {
    t_ = t;
    y_ = y;
    h_ = h0;
  }

  double t() const { return t_; }
  const Vec& y() const { return y_; }

  // Advance to t_end. Returns false if the step size underflows (stiff or
  // singular trajectory); state is left at the last accepted point.
  template <class Rhs>
  bool integrate_to(double t_end, Rhs&& rhs) {
    const double dir = (t_end >= t_) ? 1.0 : -1.0;
    if (h_ * dir <= 0.0) h_ = -h_;
    int guard = 0;
    while (dir * (t_end - t_) > 1e-14 * (std::abs(t_) + std::abs(t_end))) {
      if (++guard > 1000000) return false;
      double h = h_;
      if (dir * (t_ + h - t_end) > 0.0) h = t_end - t_;
      Vec ynew, err;
      step(h, rhs, ynew, err);
      double sc = 0.0;
      for (int i = 0; i < Dim; ++i) {
        double tol = atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(ynew[i]));
        sc = std::max(sc, std::abs(err[i]) / tol);
      }
      if (sc <= 1.0) {
        t_ += h;
        y_ = ynew;
        double fac = (sc > 0.0) ? 0.9 * std::pow(sc, -0.2) : 5.0;
        h_ = h * std::min(5.0, std::max(0.2, fac));
      } else {
        h_ = h * std::max(0.1, 0.9 * std::pow(sc, -0.2));
        if (std::abs(h_) < 1e-15 * (1.0 + std::abs(t_))) return false;
      }
    }
    return true;
  }

 private:
  template <class Rhs>
  void step(double h, Rhs&& rhs, Vec& ynew, Vec& err) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    Vec k1 = rhs(t_, y_);
    Vec k2 = rhs(t_ + c2 * h, Vec(y_ + h * a21 * k1));
    Vec k3 = rhs(t_ + c3 * h, Vec(y_ + h * (a31 * k1 + a32 * k2)));
    Vec k4 = rhs(t_ + c4 * h, Vec(y_ + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    Vec k5 = rhs(t_ + c5 * h, Vec(y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    Vec k6 = rhs(t_ + h, Vec(y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    ynew = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec k7 = rhs(t_ + h, ynew);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  }

  double atol_, rtol_;
  double t_ = 0.0, h_ = 1e-3;
  Vec y_ = Vec::Zero();
};

}  // namespace spikes
