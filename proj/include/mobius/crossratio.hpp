#pragma once

// The infinitesimal cross ratio dw^dz/(w-z)^2 on pairs of distinct plane
// points, evaluated numerically as a complex 2-form. Used as a unit-test
// anchor for the planar contour-energy forms.

#include <complex>

#include "mobius/common.hpp"

namespace mobius::cr {

using Complex = std::complex<double>;

struct TangentPairFrame {
  Complex w, z;       // base points, w != z
  Complex dw1, dw2;   // two tangent vectors at w
  Complex dz1, dz2;   // two tangent vectors at z
};

// Value of the 2-form on the decomposable pair ((dw,0),(0,dz)).
inline Complex eval_omega_cr(Complex w, Complex z, Complex dw, Complex dz) {
  if (w == z) throw GeometryError("omega_cr: coincident base points");
  Complex d = w - z;
  return dw * dz / (d * d);
}

// The 2-form on two general tangent vectors X_i = (xi_i, zeta_i) of C x C.
inline Complex omega_cr_on(Complex w, Complex z, Complex xi1, Complex zeta1,
                           Complex xi2, Complex zeta2) {
  if (w == z) throw GeometryError("omega_cr: coincident base points");
  Complex d = w - z;
  return (xi1 * zeta2 - xi2 * zeta1) / (d * d);
}

// (Re omega ^ Re omega) evaluated on the 4 vectors (dw1,0),(dw2,0),(0,dz1),(0,dz2),
// via the shuffle expansion of the wedge of two 2-forms.
inline double wedge_square_re(const TangentPairFrame& f) {
  auto om = [&](Complex a_xi, Complex a_zeta, Complex b_xi, Complex b_zeta) {
    return omega_cr_on(f.w, f.z, a_xi, a_zeta, b_xi, b_zeta).real();
  };
  // vectors: X1=(dw1,0) X2=(dw2,0) X3=(0,dz1) X4=(0,dz2)
  Complex xi[4] = {f.dw1, f.dw2, 0, 0};
  Complex ze[4] = {0, 0, f.dz1, f.dz2};
  // (A^A)(X1..X4) = 2 [A(1,2)A(3,4) - A(1,3)A(2,4) + A(1,4)A(2,3)]
  double a12 = om(xi[0], ze[0], xi[1], ze[1]);
  double a34 = om(xi[2], ze[2], xi[3], ze[3]);
  double a13 = om(xi[0], ze[0], xi[2], ze[2]);
  double a24 = om(xi[1], ze[1], xi[3], ze[3]);
  double a14 = om(xi[0], ze[0], xi[3], ze[3]);
  double a23 = om(xi[1], ze[1], xi[2], ze[2]);
  return 2 * (a12 * a34 - a13 * a24 + a14 * a23);
}

inline double wedge_square_im(const TangentPairFrame& f) {
  auto om = [&](Complex a_xi, Complex a_zeta, Complex b_xi, Complex b_zeta) {
    return omega_cr_on(f.w, f.z, a_xi, a_zeta, b_xi, b_zeta).imag();
  };
  Complex xi[4] = {f.dw1, f.dw2, 0, 0};
  Complex ze[4] = {0, 0, f.dz1, f.dz2};
  double a12 = om(xi[0], ze[0], xi[1], ze[1]);
  double a34 = om(xi[2], ze[2], xi[3], ze[3]);
  double a13 = om(xi[0], ze[0], xi[2], ze[2]);
  double a24 = om(xi[1], ze[1], xi[3], ze[3]);
  double a14 = om(xi[0], ze[0], xi[3], ze[3]);
  double a23 = om(xi[1], ze[1], xi[2], ze[2]);
  return 2 * (a12 * a34 - a13 * a24 + a14 * a23);
}

// Reference value 2 da_w ^ da_z / |z-w|^4 on the same 4 vectors.
inline double area_pair_form(const TangentPairFrame& f) {
  double daw = f.dw1.real() * f.dw2.imag() - f.dw1.imag() * f.dw2.real();
  double daz = f.dz1.real() * f.dz2.imag() - f.dz1.imag() * f.dz2.real();
  double r2 = std::norm(f.w - f.z);
  return 2 * daw * daz / (r2 * r2);
}

}  // namespace mobius::cr
