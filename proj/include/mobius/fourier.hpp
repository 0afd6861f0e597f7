#pragma once

// Truncated Fourier series on [0,2pi) with exact derivatives and uniform-grid
// least-squares fitting (plain DFT projection, which is the least-squares
// solution on a uniform grid as long as modes < samples/2).

#include <cassert>
#include <vector>

#include "mobius/common.hpp"

namespace mobius {

class FourierSeries {
 public:
  double a0 = 0;
  std::vector<double> a, b;  // cos / sin amplitudes, k = 1..M

  FourierSeries() = default;
  FourierSeries(double a0_, std::vector<double> a_, std::vector<double> b_)
      : a0(a0_), a(std::move(a_)), b(std::move(b_)) {
    assert(a.size() == b.size());
  }

  int modes() const { return static_cast<int>(a.size()); }

  // order: 0..3 derivatives. Trig recurrences keep this O(M) without repeated
  // sin/cos calls.
  double eval(double t, int order = 0) const {
    double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1, sk = 0;  // cos(k t), sin(k t) starting at k=0
    double acc = (order == 0) ? a0 : 0.0;
    int m = modes();
    for (int k = 1; k <= m; ++k) {
      double cn = ck * c1 - sk * s1;
      double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      double kk = static_cast<double>(k);
      switch (order) {
        case 0: acc += a[k - 1] * ck + b[k - 1] * sk; break;
        case 1: acc += kk * (-a[k - 1] * sk + b[k - 1] * ck); break;
        case 2: acc += kk * kk * (-a[k - 1] * ck - b[k - 1] * sk); break;
        case 3: acc += kk * kk * kk * (a[k - 1] * sk - b[k - 1] * ck); break;
        default: assert(false);
      }
    }
    return acc;
  }

  // Least-squares fit of uniformly spaced samples y_j = f(2pi j / N).
  static FourierSeries fit(const std::vector<double>& y, int modes) {
    int n = static_cast<int>(y.size());
    if (modes >= n / 2) throw ConfigError("fourier fit: modes must be < samples/2");
    FourierSeries f;
    f.a.assign(modes, 0.0);
    f.b.assign(modes, 0.0);
    double mean = 0;
    for (double v : y) mean += v;
    f.a0 = mean / n;
    for (int k = 1; k <= modes; ++k) {
      double ca = 0, cb = 0;
      double dt = kTwoPi * k / n;
      double c1 = std::cos(dt), s1 = std::sin(dt), ck = 1, sk = 0;
      for (int j = 0; j < n; ++j) {
        ca += y[j] * ck;
        cb += y[j] * sk;
        double cn = ck * c1 - sk * s1;
        sk = sk * c1 + ck * s1;
        ck = cn;
      }
      f.a[k - 1] = 2.0 * ca / n;
      f.b[k - 1] = 2.0 * cb / n;
    }
    return f;
  }

  // Reparametrize t -> -t (cos terms keep sign, sin terms flip).
  FourierSeries reversed() const {
    FourierSeries f = *this;
    for (double& v : f.b) v = -v;
    return f;
  }

  // t -> t + shift.
  FourierSeries shifted(double shift) const {
    FourierSeries f = *this;
    for (int k = 1; k <= modes(); ++k) {
      double c = std::cos(k * shift), s = std::sin(k * shift);
      f.a[k - 1] = a[k - 1] * c + b[k - 1] * s;
      f.b[k - 1] = -a[k - 1] * s + b[k - 1] * c;
    }
    return f;
  }

  FourierSeries padded(int new_modes) const {
    FourierSeries f = *this;
    f.a.resize(std::max(new_modes, modes()), 0.0);
    f.b.resize(std::max(new_modes, modes()), 0.0);
    return f;
  }

  double tail_amplitude(int from_mode) const {
    double s = 0;
    for (int k = from_mode; k <= modes(); ++k)
      s += std::abs(a[k - 1]) + std::abs(b[k - 1]);
    return s;
  }
};

}  // namespace mobius
