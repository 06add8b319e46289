#include "kfbi/geometry.hpp"

#include <algorithm>

namespace kfbi {

void ParametricSurface::derivs(double u, double v, Vec3& xu, Vec3& xv) const {
  if (embed_derivs) {
    embed_derivs(u, v, xu, xv);
    return;
  }
  // 4th-order central differences, step scaled by the domain extent.
  const double du = 1e-5 * u_extent();
  const double dv = 1e-5 * v_extent();
  auto diff4 = [](Vec3 m2, Vec3 m1, Vec3 p1, Vec3 p2, double d) {
    return (m2 - p2 + (p1 - m1) * 8.0) * (1.0 / (12.0 * d));
  };
  xu = diff4(embed(u - 2 * du, v), embed(u - du, v), embed(u + du, v),
             embed(u + 2 * du, v), du);
  xv = diff4(embed(u, v - 2 * dv), embed(u, v - dv), embed(u, v + dv),
             embed(u, v + 2 * dv), dv);
}

MetricData metric_at(const ParametricSurface& surf, double u, double v) {
  MetricData m;
  surf.derivs(u, v, m.dx1, m.dx2);
  Vec3 cr = m.dx1.cross(m.dx2);
  double area = cr.norm();
  if (area <= 1e-14)
    fail("degenerate_parameterization",
         surf.name + ": |dX1 x dX2| vanishes at (" + std::to_string(u) + ", " +
             std::to_string(v) + ")");
  m.g11 = m.dx1.dot(m.dx1);
  m.g12 = m.dx1.dot(m.dx2);
  m.g22 = m.dx2.dot(m.dx2);
  m.det_g = m.g11 * m.g22 - m.g12 * m.g12;  // = |dX1 x dX2|^2
  m.inv_g11 = m.g22 / m.det_g;
  m.inv_g12 = -m.g12 / m.det_g;
  m.inv_g22 = m.g11 / m.det_g;
  m.normal = cr * (1.0 / area);
  return m;
}

PullbackCoefficients pullback_coefficients(const ParametricSurface& surf, double u,
                                           double v, double kappa) {
  MetricData m = metric_at(surf, u, v);
  PullbackCoefficients c;
  double sg = std::sqrt(m.det_g);
  c.a11 = sg * m.inv_g11;
  c.a12 = sg * m.inv_g12;
  c.a22 = sg * m.inv_g22;
  c.a = kappa * sg;
  c.source_scale = sg;
  return c;
}

ConormalData conormal_at(const ParametricSurface& surf, double u, double v,
                         Vec2 tangent) {
  if (tangent.norm() == 0.0) fail("degenerate_tangent", "zero curve tangent");
  MetricData m = metric_at(surf, u, v);
  Vec3 e = (m.dx1 * tangent.x + m.dx2 * tangent.y).normalized();
  ConormalData c;
  c.nu = e.cross(m.normal);
  // nu . grad_S u = sum_ij g^ij (nu . dX_j) d_i u, so the flux vector is
  // b = (g^ij) w with w_j = nu . dX_j.
  double w1 = c.nu.dot(m.dx1);
  double w2 = c.nu.dot(m.dx2);
  c.b1 = m.inv_g11 * w1 + m.inv_g12 * w2;
  c.b2 = m.inv_g12 * w1 + m.inv_g22 * w2;
  return c;
}

CoefficientField pullback_field(const ParametricSurface& surf, double lambda) {
  CoefficientField f;
  const ParametricSurface* s = &surf;
  f.a11 = [s](double u, double v) {
    MetricData m = metric_at(*s, u, v);
    return std::sqrt(m.det_g) * m.inv_g11;
  };
  f.a12 = [s](double u, double v) {
    MetricData m = metric_at(*s, u, v);
    return std::sqrt(m.det_g) * m.inv_g12;
  };
  f.a22 = [s](double u, double v) {
    MetricData m = metric_at(*s, u, v);
    return std::sqrt(m.det_g) * m.inv_g22;
  };
  f.a = [s, lambda](double u, double v) {
    return lambda * std::sqrt(metric_at(*s, u, v).det_g);
  };
  f.sqrt_g = [s](double u, double v) {
    return std::sqrt(metric_at(*s, u, v).det_g);
  };
  return f;
}

CoefficientField constant_field(double a11, double a12, double a22, double a) {
  CoefficientField f;
  f.a11 = [a11](double, double) { return a11; };
  f.a12 = [a12](double, double) { return a12; };
  f.a22 = [a22](double, double) { return a22; };
  f.a = [a](double, double) { return a; };
  f.sqrt_g = [](double, double) { return 1.0; };
  return f;
}

ParametricSurface builtin_surface(const std::string& id) {
  ParametricSurface s;
  s.name = id;
  if (id == "plane") {
    s.embed = [](double u, double v) { return Vec3{u, v, 0.0}; };
    s.embed_derivs = [](double, double, Vec3& xu, Vec3& xv) {
      xu = {1, 0, 0};
      xv = {0, 1, 0};
    };
  } else if (id == "example1") {
    // (3u + v, u - 2v, u^3 + v^3)
    s.embed = [](double u, double v) {
      return Vec3{3 * u + v, u - 2 * v, u * u * u + v * v * v};
    };
    s.embed_derivs = [](double u, double v, Vec3& xu, Vec3& xv) {
      xu = {3, 1, 3 * u * u};
      xv = {1, -2, 3 * v * v};
    };
  } else if (id == "helicoid") {
    s.embed = [](double u, double v) {
      return Vec3{u * std::sin(v), u * std::cos(v), v};
    };
    s.embed_derivs = [](double u, double v, Vec3& xu, Vec3& xv) {
      xu = {std::sin(v), std::cos(v), 0};
      xv = {u * std::cos(v), -u * std::sin(v), 1};
    };
  } else if (id == "saddle") {
    s.embed = [](double u, double v) { return Vec3{u, v, u * u - v * v}; };
    s.embed_derivs = [](double u, double v, Vec3& xu, Vec3& xv) {
      xu = {1, 0, 2 * u};
      xv = {0, 1, -2 * v};
    };
  } else if (id == "paraboloid") {
    s.u0 = s.v0 = -1.4;
    s.u1 = s.v1 = 1.4;
    s.embed = [](double u, double v) { return Vec3{u, v, u * u + v * v}; };
    s.embed_derivs = [](double u, double v, Vec3& xu, Vec3& xv) {
      xu = {1, 0, 2 * u};
      xv = {0, 1, 2 * v};
    };
  } else if (id == "torus") {
    const double R = 2.0, r = 0.8;
    s.u0 = s.v0 = -kPi;
    s.u1 = s.v1 = kPi;
    s.periodic_u = s.periodic_v = true;
    s.embed = [R, r](double u, double v) {
      double w = R + r * std::sin(u);
      return Vec3{w * std::cos(v), w * std::sin(v), r * std::cos(u)};
    };
    s.embed_derivs = [R, r](double u, double v, Vec3& xu, Vec3& xv) {
      double w = R + r * std::sin(u);
      xu = {r * std::cos(u) * std::cos(v), r * std::cos(u) * std::sin(v),
            -r * std::sin(u)};
      xv = {-w * std::sin(v), w * std::cos(v), 0};
    };
  } else if (id == "cyclide") {
    // Dupin cyclide, standard parameterization with a=1, b=1, c=-0.3, d=0.5.
    const double a = 1.0, b = 1.0, c = -0.3, d = 0.5;
    s.u0 = s.v0 = -kPi;
    s.u1 = s.v1 = kPi;
    s.periodic_u = s.periodic_v = true;
    s.embed = [a, b, c, d](double u, double v) {
      double cu = std::cos(u), su = std::sin(u);
      double cv = std::cos(v), sv = std::sin(v);
      double den = a - c * cu * cv;
      return Vec3{(d * (c - a * cu * cv) + b * b * cu) / den,
                  b * su * (a - d * cv) / den, b * sv * (c * cu - d) / den};
    };
    s.embed_derivs = [a, b, c, d](double u, double v, Vec3& xu, Vec3& xv) {
      double cu = std::cos(u), su = std::sin(u);
      double cv = std::cos(v), sv = std::sin(v);
      double den = a - c * cu * cv;
      double den_u = c * su * cv, den_v = c * cu * sv;
      // Quotient rule per component, numerators N and their partials.
      double n1 = d * (c - a * cu * cv) + b * b * cu;
      double n1_u = d * a * su * cv - b * b * su;
      double n1_v = d * a * cu * sv;
      double n2 = b * su * (a - d * cv);
      double n2_u = b * cu * (a - d * cv);
      double n2_v = b * su * d * sv;
      double n3 = b * sv * (c * cu - d);
      double n3_u = -b * sv * c * su;
      double n3_v = b * cv * (c * cu - d);
      double inv2 = 1.0 / (den * den);
      xu = {(n1_u * den - n1 * den_u) * inv2, (n2_u * den - n2 * den_u) * inv2,
            (n3_u * den - n3 * den_u) * inv2};
      xv = {(n1_v * den - n1 * den_v) * inv2, (n2_v * den - n2 * den_v) * inv2,
            (n3_v * den - n3 * den_v) * inv2};
    };
  } else {
    fail("unknown_surface", id);
  }
  return s;
}

}  // namespace kfbi
