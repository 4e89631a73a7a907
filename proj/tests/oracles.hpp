// Closed-form reference values, written independently of the library so the
// tests never compare the code against itself.
#pragma once

#include <cmath>

namespace oracle {

constexpr double pi = 3.14159265358979323846;

// Gaussian density psi = -|p|^2 in R^3.
inline double gaussian_ric(double v2) { return 2.0 * v2; }
inline double gaussian_scalar(double r2) { return 12.0 - 4.0 * r2; }

// psi = k log|p| in R^3.
inline double radial_log_scalar(double k, double r) { return -k * (k + 2.0) / (r * r); }
// f-mean curvature of the sphere |p| = r bounding {|p| >= r}, inner normal.
inline double radial_log_boundary_Hf(double k, double r) { return -(k + 2.0) / r; }
// H_f of the sphere of radius r with outward normal: 2H - <grad psi, N>.
inline double radial_log_sphere_Hf(double k, double r) { return -2.0 / r - k / r; }

// Unit half-sphere, psi = k log|p|: potential Ric_f(N,N) + |sigma|^2 = 2 + k,
// Neumann spectrum of the half-sphere is l(l+1) for modes even across the equator.
inline double hemisphere_lambda(int l, double k) { return l * (l + 1.0) - (2.0 + k); }

// Weighted volume between the unit sphere and the sphere of radius 1 + s,
// over the upper half, constant density.
inline double half_shell_volume(double s) { return 2.0 * pi / 3.0 * (std::pow(1.0 + s, 3) - 1.0); }

// Gaussian density on the unit half-sphere: lambda_min of I_f is -(2 + 2) = -4
// (potential Ric_f = 2 plus |sigma|^2 = 2) with constant eigenfunction.
constexpr double gaussian_hemisphere_lambda_min = -4.0;

// Unit sphere, constant density: Jacobi spectrum l(l+1) - 2.
inline double sphere_lambda(int l) { return l * (l + 1.0) - 2.0; }

// Second variation of A + H V along inflation of the unit half-sphere with
// psi = k log|p|, normal speed u = 1: I(1,1) = -(2 + k) * |half-sphere| = -(2 + k) 2 pi.
inline double hemisphere_inflation_index(double k) { return -(2.0 + k) * 2.0 * pi; }

// d/dr H_f(r) for spheres of radius r, psi = k log|p|: H_f = -(2 + k)/r.
inline double hemisphere_dHf(double k, double r) { return (2.0 + k) / (r * r); }

}  // namespace oracle
