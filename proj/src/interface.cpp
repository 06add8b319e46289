#include "kfbi/interface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kfbi {

ParametricCurve make_circle(double radius, Vec2 center) {
  ParametricCurve c;
  c.kind = "circle";
  c.eval = [radius, center](double t) {
    return Vec2{center.x + radius * std::cos(t), center.y + radius * std::sin(t)};
  };
  c.eval_deriv = [radius](double t) {
    return Vec2{-radius * std::sin(t), radius * std::cos(t)};
  };
  return c;
}

ParametricCurve make_rotated_ellipse(double ra, double rb, double alpha) {
  ParametricCurve c;
  c.kind = "rotated_ellipse";
  double ca = std::cos(alpha), sa = std::sin(alpha);
  c.eval = [=](double t) {
    double ct = std::cos(t), st = std::sin(t);
    return Vec2{ra * ct * ca - rb * st * sa, ra * ct * sa + rb * st * ca};
  };
  c.eval_deriv = [=](double t) {
    double ct = std::cos(t), st = std::sin(t);
    return Vec2{-ra * st * ca - rb * ct * sa, -ra * st * sa + rb * ct * ca};
  };
  return c;
}

ParametricCurve make_star(double ra, double rb, double alpha, double eps, int folds) {
  ParametricCurve c;
  c.kind = "star";
  c.eval = [=](double t) {
    double rc = eps * std::cos(folds * t);
    return Vec2{(ra + rc) * std::cos(t + alpha), (rb + rc) * std::sin(t + alpha)};
  };
  c.eval_deriv = [=](double t) {
    double rc = eps * std::cos(folds * t);
    double drc = -eps * folds * std::sin(folds * t);
    return Vec2{drc * std::cos(t + alpha) - (ra + rc) * std::sin(t + alpha),
                drc * std::sin(t + alpha) + (rb + rc) * std::cos(t + alpha)};
  };
  return c;
}

namespace {

// Gauss 7 / Kronrod 15 pair on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.0,               0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
constexpr double kKronrodWeights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[4] = {0.417959183673469, 0.381830050505119,
                                     0.279705391489277, 0.129484966168870};

template <class F>
void gk15(const F& f, double a, double b, double& kron, double& gauss) {
  double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  double fk = 0.0, fg = 0.0;
  double f0 = f(c);
  fk += kKronrodWeights[0] * f0;
  fg += kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    double fp = f(c + hw * kKronrodNodes[i]);
    double fm = f(c - hw * kKronrodNodes[i]);
    fk += kKronrodWeights[i] * (fp + fm);
    if (i % 2 == 0) fg += kGaussWeights[i / 2] * (fp + fm);
  }
  kron = fk * hw;
  gauss = fg * hw;
}

template <class F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth = 0) {
  double kron, gauss;
  gk15(f, a, b, kron, gauss);
  if (std::abs(kron - gauss) <= tol || depth >= 30) return kron;
  double m = 0.5 * (a + b);
  return adaptive_gk(f, a, m, 0.5 * tol, depth + 1) +
         adaptive_gk(f, m, b, 0.5 * tol, depth + 1);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
    double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return (v > 0) - (v < 0);
  };
  int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  return o1 != o2 && o3 != o4;
}

}  // namespace

double arc_length(const ParametricCurve& curve, double t0, double t1, double tol) {
  auto speed = [&](double t) { return curve.eval_deriv(t).norm(); };
  return adaptive_gk(speed, t0, t1, tol);
}

bool curve_is_simple(const ParametricCurve& curve, int samples) {
  std::vector<Vec2> p(samples);
  for (int i = 0; i < samples; ++i) p[i] = curve.eval(kTwoPi * i / samples);
  for (int i = 0; i < samples; ++i) {
    Vec2 a1 = p[i], a2 = p[(i + 1) % samples];
    for (int j = i + 2; j < samples; ++j) {
      if (i == 0 && j == samples - 1) continue;  // adjacent through wrap
      if (segments_intersect(a1, a2, p[j], p[(j + 1) % samples])) return false;
    }
  }
  return true;
}

SplineCurve SplineCurve::build(const std::vector<Vec2>& knots) {
  const int m = static_cast<int>(knots.size());
  if (m < 8) fail("spline_too_few_knots", "need at least 8 knots");
  // Degenerate (area-free) closed polygons cannot bound a region.
  double area2 = 0.0, diam2 = 0.0;
  for (int k = 0; k < m; ++k) {
    Vec2 a = knots[k], b = knots[(k + 1) % m];
    area2 += a.x * b.y - b.x * a.y;
    diam2 = std::max(diam2, (a - knots[0]).dot(a - knots[0]));
  }
  if (std::abs(area2) < 1e-12 * std::max(diam2, 1e-300))
    fail("spline_degenerate", "knot polygon encloses no area");

  SplineCurve s;
  s.knots_ = knots;
  s.seg_ = kTwoPi / m;

  // Periodic spline moments: M_{k-1} + 4 M_k + M_{k+1} = 6 (y_{k-1} - 2 y_k
  // + y_{k+1}) / seg^2, solved as a cyclic tridiagonal system via
  // Sherman-Morrison.
  auto solve_cyclic = [&](const std::vector<double>& y) {
    std::vector<double> d(m);
    double inv = 6.0 / (s.seg_ * s.seg_);
    for (int k = 0; k < m; ++k)
      d[k] = inv * (y[(k + m - 1) % m] - 2.0 * y[k] + y[(k + 1) % m]);
    const double gamma = -4.0;
    std::vector<double> b(m, 4.0);
    b[0] -= gamma;
    b[m - 1] -= 1.0 / gamma;
    auto thomas = [&](std::vector<double> rhs) {
      std::vector<double> c(m, 0.0), x(m);
      double beta = b[0];
      x[0] = rhs[0] / beta;
      for (int k = 1; k < m; ++k) {
        c[k] = 1.0 / beta;
        beta = b[k] - c[k];
        if (beta == 0.0) fail("spline_singular", "singular spline system");
        x[k] = (rhs[k] - x[k - 1]) / beta;
      }
      for (int k = m - 2; k >= 0; --k) x[k] -= c[k + 1] * x[k + 1];
      return x;
    };
    std::vector<double> u(m, 0.0);
    u[0] = gamma;
    u[m - 1] = 1.0;
    std::vector<double> x1 = thomas(d), x2 = thomas(u);
    double vx1 = x1[0] + x1[m - 1] / gamma;
    double vx2 = x2[0] + x2[m - 1] / gamma;
    double factor = vx1 / (1.0 + vx2);
    for (int k = 0; k < m; ++k) x1[k] -= factor * x2[k];
    return x1;
  };

  std::vector<double> yx(m), yy(m);
  for (int k = 0; k < m; ++k) {
    yx[k] = knots[k].x;
    yy[k] = knots[k].y;
  }
  s.mx_ = solve_cyclic(yx);
  s.my_ = solve_cyclic(yy);
  return s;
}

namespace {
// Locate segment and local coordinate for a periodic parameter value.
inline void locate(double theta, double seg, int m, int& k, double& t) {
  double w = theta / seg;
  double fk = std::floor(w);
  k = static_cast<int>(fk) % m;
  if (k < 0) k += m;
  t = w - fk;
}
}  // namespace

Vec2 SplineCurve::eval(double theta) const {
  const int m = knot_count();
  int k;
  double t;
  locate(theta, seg_, m, k, t);
  int k1 = (k + 1) % m;
  double s2 = seg_ * seg_ / 6.0;
  double a = 1.0 - t;
  double wa = (a * a * a - a) * s2, wb = (t * t * t - t) * s2;
  return {knots_[k].x * a + knots_[k1].x * t + mx_[k] * wa + mx_[k1] * wb,
          knots_[k].y * a + knots_[k1].y * t + my_[k] * wa + my_[k1] * wb};
}

Vec2 SplineCurve::deriv(double theta) const {
  const int m = knot_count();
  int k;
  double t;
  locate(theta, seg_, m, k, t);
  int k1 = (k + 1) % m;
  double a = 1.0 - t;
  double da = (-3.0 * a * a + 1.0) * seg_ / 6.0, db = (3.0 * t * t - 1.0) * seg_ / 6.0;
  return {(knots_[k1].x - knots_[k].x) / seg_ + mx_[k] * da + mx_[k1] * db,
          (knots_[k1].y - knots_[k].y) / seg_ + my_[k] * da + my_[k1] * db};
}

Vec2 SplineCurve::second_deriv(double theta) const {
  const int m = knot_count();
  int k;
  double t;
  locate(theta, seg_, m, k, t);
  int k1 = (k + 1) % m;
  return {mx_[k] * (1.0 - t) + mx_[k1] * t, my_[k] * (1.0 - t) + my_[k1] * t};
}

std::vector<Vec2> SplineCurve::polyline(int samples_per_segment) const {
  int total = knot_count() * samples_per_segment;
  std::vector<Vec2> p(total);
  for (int i = 0; i < total; ++i) p[i] = eval(kTwoPi * i / total);
  return p;
}

std::vector<Vec2> sample_knots(const ParametricCurve& curve, double h) {
  if (h <= 0) fail("bad_spacing", "grid spacing must be positive");
  double perimeter = arc_length(curve, 0.0, kTwoPi);
  int m = static_cast<int>(std::lround(perimeter / (1.5 * h)));
  if (m < 8)
    fail("curve_too_small", "fewer than 8 interface points at this grid size");

  // Cumulative arc-length table, then per-knot Newton refinement.
  const int table_n = std::max(1024, 8 * m);
  std::vector<double> cum(table_n + 1, 0.0);
  for (int i = 0; i < table_n; ++i) {
    double a = kTwoPi * i / table_n, b = kTwoPi * (i + 1) / table_n;
    cum[i + 1] = cum[i] + arc_length(curve, a, b, 1e-12);
  }
  std::vector<Vec2> knots(m);
  double spacing = perimeter / m;
  int seg = 0;
  for (int l = 0; l < m; ++l) {
    double target = l * spacing;
    while (seg + 1 < table_n && cum[seg + 1] < target) ++seg;
    double t = kTwoPi * (seg + (target - cum[seg]) /
                                   std::max(cum[seg + 1] - cum[seg], 1e-300)) /
               table_n;
    double base = kTwoPi * seg / table_n;
    for (int it = 0; it < 8; ++it) {
      double f = cum[seg] + arc_length(curve, base, t, 1e-13) - target;
      double df = curve.eval_deriv(t).norm();
      double step = f / df;
      t -= step;
      if (std::abs(step) < 1e-14) break;
    }
    knots[l] = curve.eval(t);
  }
  return knots;
}

InterfacePointSet build_interface_points(const SplineCurve& spline,
                                         const ParametricSurface& surf) {
  InterfacePointSet set;
  const int m = spline.knot_count();
  set.pts.resize(m);

  // Orientation: flip the traversal direction if the conormal at the first
  // point does not point toward the exterior of the knot polygon.
  double area2 = 0.0;
  const auto& knots = spline.knots();
  for (int k = 0; k < m; ++k) {
    Vec2 a = knots[k], b = knots[(k + 1) % m];
    area2 += a.x * b.y - b.x * a.y;
  }
  bool ccw = area2 > 0.0;

  Vec2 t0 = spline.deriv(0.0);
  t0 = t0 * (1.0 / t0.norm());
  ConormalData c0 = conormal_at(surf, knots[0].x, knots[0].y, t0);
  Vec2 outward = ccw ? Vec2{t0.y, -t0.x} : Vec2{-t0.y, t0.x};
  double flip = (c0.b1 * outward.x + c0.b2 * outward.y >= 0.0) ? 1.0 : -1.0;

  double total = 0.0;
  std::vector<double> seg_arc(m, 0.0);
  const int sub = 16;
  for (int k = 0; k < m; ++k) {
    double a = spline.knot_theta(k);
    double acc = 0.0;
    Vec2 prev = spline.eval(a);
    for (int s = 1; s <= sub; ++s) {
      Vec2 p = spline.eval(a + spline.knot_theta(1) * s / sub);
      acc += (p - prev).norm();
      prev = p;
    }
    seg_arc[k] = acc;
    total += acc;
  }

  double arc = 0.0;
  for (int l = 0; l < m; ++l) {
    InterfacePoint& p = set.pts[l];
    p.xi = knots[l];
    Vec2 t = spline.deriv(spline.knot_theta(l));
    t = t * (flip / t.norm());
    p.tangent = t;
    ConormalData c = conormal_at(surf, p.xi.x, p.xi.y, t);
    p.nu = c.nu;
    p.b1 = c.b1;
    p.b2 = c.b2;
    p.arc = arc;
    arc += seg_arc[l];
  }
  set.perimeter = total;
  set.spacing = total / m;
  return set;
}

namespace {

struct Crossing {
  double x;
  int dir;
};

}  // namespace

NodeClassification classify_nodes(const SplineCurve& spline, const CartesianGrid& grid,
                                  const StencilPattern& pattern) {
  NodeClassification cls;
  const int nx = grid.nx(), ny = grid.ny();
  cls.side.assign(grid.node_count(), -1);
  cls.irregular.assign(grid.node_count(), 0);

  const auto poly = spline.polyline(16);
  const int np = static_cast<int>(poly.size());

  // The interface must stay away from the domain frame: 2h margin.
  double margin = 2.0 * grid.h;
  for (const Vec2& p : poly) {
    if (p.x < grid.x0 + margin || p.x > grid.x1 - margin || p.y < grid.y0 + margin ||
        p.y > grid.y1 - margin)
      fail("interface_near_boundary",
           "interface closer than 2h to the parameter-domain frame");
  }

  const double tie_tol = 1e-12 * grid.h;
  std::vector<Crossing> crossings;
  for (int j = 0; j < ny; ++j) {
    double yr = grid.y(j);
    crossings.clear();
    for (int s = 0; s < np; ++s) {
      Vec2 p = poly[s], q = poly[(s + 1) % np];
      if (p.y <= yr && q.y > yr) {
        crossings.push_back({p.x + (yr - p.y) * (q.x - p.x) / (q.y - p.y), +1});
      } else if (q.y <= yr && p.y > yr) {
        crossings.push_back({p.x + (yr - p.y) * (q.x - p.x) / (q.y - p.y), -1});
      }
    }
    if (crossings.empty()) continue;
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.x < b.x; });
    size_t c = 0;
    int winding = 0;
    for (int i = 0; i < nx; ++i) {
      double xn = grid.x(i);
      bool on_curve = false;
      while (c < crossings.size() && crossings[c].x < xn - tie_tol) {
        winding += crossings[c].dir;
        ++c;
      }
      for (size_t k = c; k < crossings.size() && crossings[k].x <= xn + tie_tol; ++k)
        on_curve = true;
      cls.side[grid.index(i, j)] = (!on_curve && winding != 0) ? +1 : -1;
    }
  }

  // Regular/irregular split and the Z_h set.
  std::vector<uint8_t> in_z(grid.node_count(), 0);
  auto neighbor = [&](int i, int j, int dx, int dy, int& out) {
    int ii = i + dx, jj = j + dy;
    if (grid.periodic_x) ii = grid.wrap_x(ii);
    if (grid.periodic_y) jj = grid.wrap_y(jj);
    if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) return false;
    out = grid.index(ii, jj);
    return true;
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!grid.interior(i, j)) continue;
      int idx = grid.index(i, j);
      uint16_t mask = pattern(i, j);
      int8_t center_side = cls.side[idx];
      uint16_t opp = 0;
      for (int k = 0; k < 9; ++k) {
        if (!(mask & (1u << k))) continue;
        int dx = k % 3 - 1, dy = k / 3 - 1;
        int nb;
        if (!neighbor(i, j, dx, dy, nb)) continue;
        if (cls.side[nb] != center_side) opp |= (1u << k);
      }
      if (opp) {
        cls.irregular[idx] = 1;
        IrregularNode rec;
        rec.node = idx;
        rec.i = i;
        rec.j = j;
        rec.opp_mask = opp;
        cls.irregular_nodes.push_back(rec);
        for (int k = 0; k < 9; ++k) {
          if (!(opp & (1u << k))) continue;
          int nb;
          neighbor(i, j, k % 3 - 1, k / 3 - 1, nb);
          in_z[nb] = 1;
        }
      }
    }
  }
  for (int idx = 0; idx < grid.node_count(); ++idx)
    if (in_z[idx]) cls.z_set.push_back(idx);
  return cls;
}

ClosestPointResult closest_point(const SplineCurve& spline, Vec2 x) {
  const int m = spline.knot_count();
  const int ns = 4 * m;
  double best_t = 0.0, best_d2 = std::numeric_limits<double>::max();
  for (int s = 0; s < ns; ++s) {
    double t = kTwoPi * s / ns;
    Vec2 d = spline.eval(t) - x;
    double d2 = d.dot(d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_t = t;
    }
  }
  double t = best_t;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    Vec2 g = spline.eval(t), dg = spline.deriv(t), ddg = spline.second_deriv(t);
    Vec2 r = g - x;
    double grad = r.dot(dg);
    double hess = dg.dot(dg) + r.dot(ddg);
    if (std::abs(grad) < 5e-13) {
      converged = true;
      break;
    }
    if (hess <= 0) break;  // left the convex valley, keep sampled minimum
    t -= grad / hess;
  }
  if (!converged) t = best_t;

  ClosestPointResult res;
  res.theta = t;
  res.distance = (spline.eval(t) - x).norm();

  // Winding of the dense polyline about x decides the side.
  const auto poly = spline.polyline(8);
  int winding = 0;
  const int np = static_cast<int>(poly.size());
  for (int s = 0; s < np; ++s) {
    Vec2 p = poly[s], q = poly[(s + 1) % np];
    if (p.y <= x.y && q.y > x.y) {
      if (p.x + (x.y - p.y) * (q.x - p.x) / (q.y - p.y) < x.x) winding += 1;
    } else if (q.y <= x.y && p.y > x.y) {
      if (p.x + (x.y - p.y) * (q.x - p.x) / (q.y - p.y) < x.x) winding -= 1;
    }
  }
  res.side = winding != 0 ? +1 : -1;
  return res;
}

}  // namespace kfbi
