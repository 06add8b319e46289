#pragma once

#include <functional>
#include <string>

#include "kfbi/common.hpp"

namespace kfbi {

/// Embedding map X(xi) of a surface patch over a rectangular (possibly
/// periodic) parameter domain.  Derivatives are analytic when supplied;
/// otherwise a 4th-order central difference of the embedding is used.
struct ParametricSurface {
  std::string name;
  double u0 = -1.0, u1 = 1.0;
  double v0 = -1.0, v1 = 1.0;
  bool periodic_u = false;
  bool periodic_v = false;
  std::function<Vec3(double, double)> embed;
  // Analytic (dX/du, dX/dv); may be null, in which case derivatives fall
  // back to finite differences of embed.
  std::function<void(double, double, Vec3&, Vec3&)> embed_derivs;

  double u_extent() const { return u1 - u0; }
  double v_extent() const { return v1 - v0; }
  void derivs(double u, double v, Vec3& xu, Vec3& xv) const;
};

/// Induced metric at a parameter point: g_ij = dX_i . dX_j, its inverse,
/// determinant and the unit surface normal.
struct MetricData {
  double g11 = 0, g12 = 0, g22 = 0;
  double det_g = 0;
  double inv_g11 = 0, inv_g12 = 0, inv_g22 = 0;
  Vec3 normal;
  Vec3 dx1, dx2;  // embedding tangents, kept for conormal construction
};

/// Coefficients of the planar divergence-form pullback of the surface
/// operator:  sum_ij d_i(a_ij d_j u) - a u  with  a_ij = sqrt(g) g^ij
/// and  a = kappa sqrt(g);  the source is scaled by sqrt(g).
struct PullbackCoefficients {
  double a11 = 0, a12 = 0, a22 = 0;
  double a = 0;
  double source_scale = 0;  // sqrt(g)
};

/// Conormal direction at an interface point: nu = e x n is tangent to the
/// surface and normal to the curve; (b1, b2) contract parameter-plane
/// gradients into the conormal derivative, nu . grad_S u = b1 d1u + b2 d2u.
struct ConormalData {
  Vec3 nu;
  double b1 = 0, b2 = 0;
};

MetricData metric_at(const ParametricSurface& surf, double u, double v);
PullbackCoefficients pullback_coefficients(const ParametricSurface& surf, double u,
                                           double v, double kappa);
ConormalData conormal_at(const ParametricSurface& surf, double u, double v,
                         Vec2 tangent);

/// Planar coefficient field consumed by the finite-difference and
/// correction machinery.  All callables take parameter coordinates.
struct CoefficientField {
  std::function<double(double, double)> a11, a12, a22, a;
  std::function<double(double, double)> sqrt_g;
};

/// Pullback field of a surface with reaction ratio lambda (a = lambda sqrt g).
CoefficientField pullback_field(const ParametricSurface& surf, double lambda);

/// Constant-coefficient field, used for flat-plane problems and tests.
CoefficientField constant_field(double a11, double a12, double a22, double a);

/// Built-in surface catalog ("plane", "example1", "helicoid", "saddle",
/// "paraboloid", "torus", "cyclide").
ParametricSurface builtin_surface(const std::string& id);

}  // namespace kfbi
