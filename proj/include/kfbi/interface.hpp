#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kfbi/geometry.hpp"
#include "kfbi/grid.hpp"

namespace kfbi {

/// Closed analytic curve in the parameter plane, theta in [0, 2pi).
struct ParametricCurve {
  std::string kind;
  std::function<Vec2(double)> eval;
  std::function<Vec2(double)> eval_deriv;
};

ParametricCurve make_circle(double radius, Vec2 center = {0, 0});
ParametricCurve make_rotated_ellipse(double ra, double rb, double alpha);
ParametricCurve make_star(double ra, double rb, double alpha, double eps, int folds);

/// Arc length of the curve over [t0, t1] by adaptive Gauss-Kronrod
/// quadrature of |gamma'|.
double arc_length(const ParametricCurve& curve, double t0, double t1,
                  double tol = 1e-10);

/// Non-self-intersection check by segment-pair testing on a uniform sample.
bool curve_is_simple(const ParametricCurve& curve, int samples = 512);

/// Periodic cubic spline through M knots, parameterized by theta_k = 2 pi k / M.
class SplineCurve {
public:
  SplineCurve() = default;
  static SplineCurve build(const std::vector<Vec2>& knots);

  Vec2 eval(double theta) const;
  Vec2 deriv(double theta) const;
  Vec2 second_deriv(double theta) const;

  int knot_count() const { return static_cast<int>(knots_.size()); }
  const std::vector<Vec2>& knots() const { return knots_; }
  double knot_theta(int k) const { return seg_ * k; }

  /// Dense polyline sampling (samples_per_segment points per knot interval).
  std::vector<Vec2> polyline(int samples_per_segment) const;

private:
  std::vector<Vec2> knots_;
  std::vector<double> mx_, my_;  // spline moments (second derivatives at knots)
  double seg_ = 0.0;             // knot spacing in theta
};

/// Equal-arc-length knot sampling with target spacing 1.5 h.
/// M = round(perimeter / 1.5h); fails with curve_too_small if M < 8.
std::vector<Vec2> sample_knots(const ParametricCurve& curve, double h);

struct InterfacePoint {
  Vec2 xi;       // position in the parameter plane
  Vec2 tangent;  // unit spline tangent, oriented so the conormal points outward
  Vec3 nu;       // embedded conormal
  double b1 = 0, b2 = 0;  // conormal flux coefficients
  double arc = 0;         // arc-length position along the interface
};

struct InterfacePointSet {
  std::vector<InterfacePoint> pts;
  double spacing = 0;    // target arc spacing between adjacent points
  double perimeter = 0;
  int size() const { return static_cast<int>(pts.size()); }
  int next(int l) const { return (l + 1) % size(); }
  int prev(int l) const { return (l + size() - 1) % size(); }
};

/// Interface points at the spline knots with conormal data from the surface.
/// The traversal orientation is normalized so that the conormal points from
/// the interior (+) side to the exterior (-) side.
InterfacePointSet build_interface_points(const SplineCurve& spline,
                                         const ParametricSurface& surf);

/// Per-node stencil pattern callback: 9-bit mask of active offsets,
/// k = (dy+1)*3 + (dx+1).
using StencilPattern = std::function<uint16_t(int i, int j)>;

struct IrregularNode {
  int node = 0;           // grid node index
  int i = 0, j = 0;
  uint16_t opp_mask = 0;  // active stencil offsets lying on the opposite side
};

struct NodeClassification {
  std::vector<int8_t> side;          // +1 interior of gamma, -1 exterior
  std::vector<uint8_t> irregular;    // per-node flag
  std::vector<IrregularNode> irregular_nodes;
  std::vector<int> z_set;            // nodes referenced by opposite-side stencils

  bool plus(int idx) const { return side[idx] > 0; }
};

/// Side classification by winding number of the spline about each node,
/// plus the regular/irregular split induced by the stencil pattern.
/// Nodes within 1e-12 h of the curve are assigned the exterior side.
NodeClassification classify_nodes(const SplineCurve& spline, const CartesianGrid& grid,
                                  const StencilPattern& pattern);

struct ClosestPointResult {
  double theta = 0;
  double distance = 0;
  int side = 0;  // +1 inside, -1 outside
};

/// Closest spline point via Newton iteration seeded from a dense sample.
ClosestPointResult closest_point(const SplineCurve& spline, Vec2 x);

}  // namespace kfbi
