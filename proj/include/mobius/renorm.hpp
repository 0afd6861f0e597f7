#pragma once

// Renormalization engine: evaluate a cutoff family F(eps), fit the declared
// divergence model sum_i c_i eps^{e_i}, and read off the constant term.
// Supported exponents: -2, -1, 0, 1 (no logarithms).

#include <cmath>
#include <map>
#include <vector>

#include "mobius/common.hpp"

namespace mobius {

struct DivergenceModel {
  std::vector<int> exponents;            // must contain 0
  std::map<int, double> pinned;          // known coefficients, subtracted first
  static DivergenceModel constant_plus_linear() { return {{0, 1}, {}}; }
  static DivergenceModel with_inverse() { return {{-1, 0, 1}, {}}; }
};

struct RenormResult {
  double value = 0;                       // extrapolated constant term
  double fit_residual = 0;                // max |fit - sample| / scale
  double error_estimate = 0;              // |value - value w/o smallest rung|
  double condition = 0;                   // of the scaled design matrix
  std::vector<std::pair<double, double>> ladder;  // (eps, F(eps)), decreasing eps
  std::map<int, double> coefficients;     // fitted c_e by exponent
};

namespace detail {

// Least squares via normal equations with column scaling; tiny systems only.
inline std::vector<double> lsq_fit(const std::vector<std::vector<double>>& A,
                                   const std::vector<double>& y, double* cond_out) {
  size_t m = A.size(), n = A[0].size();
  std::vector<double> scale(n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < m; ++i) scale[j] = std::max(scale[j], std::abs(A[i][j]));
    if (scale[j] == 0) scale[j] = 1;
  }
  std::vector<std::vector<double>> G(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) {
      double aij = A[i][j] / scale[j];
      b[j] += aij * y[i];
      for (size_t k = 0; k <= j; ++k) G[j][k] += aij * A[i][k] / scale[k];
    }
  for (size_t j = 0; j < n; ++j)
    for (size_t k = j + 1; k < n; ++k) G[j][k] = G[k][j];
  // condition estimate from the eigenvalue range of G (power iteration both ways)
  auto matvec = [&](const std::vector<double>& v) {
    std::vector<double> r(n, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) r[i] += G[i][j] * v[j];
    return r;
  };
  std::vector<double> v(n, 1.0);
  double lmax = 0;
  for (int it = 0; it < 60; ++it) {
    auto w = matvec(v);
    double nn = 0;
    for (double x : w) nn += x * x;
    nn = std::sqrt(nn);
    if (nn == 0) break;
    for (size_t i = 0; i < n; ++i) v[i] = w[i] / nn;
    lmax = nn;
  }
  // Cholesky solve (G is SPD unless degenerate)
  std::vector<std::vector<double>> L(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j <= i; ++j) {
      double s = G[i][j];
      for (size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
      if (i == j) {
        if (s <= 0) throw ExtrapolationError("extrapolate: singular design matrix");
        L[i][i] = std::sqrt(s);
      } else {
        L[i][j] = s / L[j][j];
      }
    }
  double lmin_diag = 1e300;
  for (size_t i = 0; i < n; ++i) lmin_diag = std::min(lmin_diag, L[i][i] * L[i][i]);
  if (cond_out) *cond_out = lmax / std::max(lmin_diag, 1e-300);
  std::vector<double> zv(n), xv(n);
  for (size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (size_t k = 0; k < i; ++k) s -= L[i][k] * zv[k];
    zv[i] = s / L[i][i];
  }
  for (size_t ii = n; ii-- > 0;) {
    double s = zv[ii];
    for (size_t k = ii + 1; k < n; ++k) s -= L[k][ii] * xv[k];
    xv[ii] = s / L[ii][ii];
  }
  for (size_t j = 0; j < n; ++j) xv[j] /= scale[j];
  return xv;
}

inline RenormResult fit_once(const std::vector<std::pair<double, double>>& samples,
                             const DivergenceModel& model) {
  size_t m = samples.size(), n = model.exponents.size();
  std::vector<std::vector<double>> A(m, std::vector<double>(n));
  std::vector<double> y(m);
  for (size_t i = 0; i < m; ++i) {
    double eps = samples[i].first;
    double val = samples[i].second;
    for (const auto& [e, c] : model.pinned) val -= c * std::pow(eps, e);
    for (size_t j = 0; j < n; ++j) A[i][j] = std::pow(eps, model.exponents[j]);
    y[i] = val;
  }
  RenormResult r;
  auto c = lsq_fit(A, y, &r.condition);
  double scale = 0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  if (scale == 0) scale = 1;
  for (size_t i = 0; i < m; ++i) {
    double fit = 0;
    for (size_t j = 0; j < n; ++j) fit += c[j] * A[i][j];
    r.fit_residual = std::max(r.fit_residual, std::abs(fit - y[i]) / scale);
  }
  for (size_t j = 0; j < n; ++j) {
    int e = model.exponents[j];
    r.coefficients[e] = c[j] + (model.pinned.count(e) ? model.pinned.at(e) : 0.0);
    if (e == 0) r.value = c[j];
  }
  return r;
}

}  // namespace detail

inline RenormResult extrapolate(std::vector<std::pair<double, double>> samples,
                                const DivergenceModel& model) {
  if (samples.size() < 4)
    throw ConfigError("extrapolate: need at least 4 ladder samples");
  bool has_const = false;
  for (int e : model.exponents) has_const |= (e == 0);
  if (!has_const) throw ConfigError("extrapolate: model must include the constant term");
  std::sort(samples.begin(), samples.end(),
            [](auto& a, auto& b) { return a.first > b.first; });
  if (samples.front().first < 8 * samples.back().first)
    throw ConfigError("extrapolate: ladder must span at least a factor of 8 in eps");
  RenormResult r = detail::fit_once(samples, model);
  if (r.condition > 1e12)
    throw ExtrapolationError("extrapolate: design matrix too ill-conditioned (cond=" +
                             std::to_string(r.condition) + ")");
  std::vector<std::pair<double, double>> dropped(samples.begin(), samples.end() - 1);
  if (dropped.size() >= model.exponents.size()) {
    RenormResult r2 = detail::fit_once(dropped, model);
    r.error_estimate = std::abs(r.value - r2.value);
  }
  r.ladder = samples;
  return r;
}

// Geometric cutoff ladder: `rungs` values starting at eps0, ratio 1/2.
inline std::vector<double> geometric_ladder(double eps0, int rungs = 6, double ratio = 0.5) {
  std::vector<double> l(rungs);
  for (int i = 0; i < rungs; ++i) l[i] = eps0 * std::pow(ratio, i);
  return l;
}

}  // namespace mobius
