#include "kfbi/potentials.hpp"

#include <algorithm>
#include <cmath>

namespace kfbi {

std::shared_ptr<ProblemGeometry> build_geometry(const ParametricSurface& surface,
                                                const ParametricCurve& curve,
                                                const CartesianGrid& grid) {
  auto geom = std::make_shared<ProblemGeometry>();
  geom->surface = surface;
  geom->grid = grid;

  std::vector<Vec2> knots = sample_knots(curve, grid.h);
  geom->spline = SplineCurve::build(knots);
  geom->points = build_interface_points(geom->spline, geom->surface);

  // The mixed-stencil branch depends only on the sign of a12, which is
  // lambda-independent, so one classification serves every context.
  CoefficientField base = pullback_field(geom->surface, 0.0);
  const CartesianGrid& g = geom->grid;
  StencilPattern pattern = [&base, &g](int i, int j) -> uint16_t {
    double a12 = base.a12(g.x(i), g.y(j));
    uint16_t five = (1u << 1) | (1u << 3) | (1u << 4) | (1u << 5) | (1u << 7);
    if (std::abs(a12) < 1e-14) return five;
    if (a12 < 0) return five | (1u << 6) | (1u << 2);  // NW + SE corners
    return five | (1u << 0) | (1u << 8);               // SW + NE corners
  };
  geom->cls = classify_nodes(geom->spline, g, pattern);

  // Patch assignments for the correction band plus every interpolation node.
  std::vector<int> nodes = geom->cls.z_set;
  for (int l = 0; l < geom->points.size(); ++l) {
    const Vec2 q = geom->points.pts[l].xi;
    int ic = static_cast<int>(std::lround((q.x - g.x0) / g.h));
    int jc = static_cast<int>(std::lround((q.y - g.y0) / g.h));
    if (!g.periodic_x) ic = std::clamp(ic, 1, g.n - 1);
    if (!g.periodic_y) jc = std::clamp(jc, 1, g.n - 1);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int i = g.periodic_x ? g.wrap_x(ic + dx) : ic + dx;
        int j = g.periodic_y ? g.wrap_y(jc + dy) : jc + dy;
        if (i >= 0 && i < g.nx() && j >= 0 && j < g.ny())
          nodes.push_back(g.index(i, j));
      }
  }
  geom->patch_of_node = assign_patches(g, geom->points, nodes);
  geom->interp = build_interp_stencils(g, geom->points, geom->cls, geom->patch_of_node);

  geom->sqrt_g.resize(g.node_count());
  CoefficientField field = pullback_field(geom->surface, 0.0);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      geom->sqrt_g[g.index(i, j)] = field.sqrt_g(g.x(i), g.y(j));
  return geom;
}

PotentialContext::PotentialContext(std::shared_ptr<ProblemGeometry> g, double lambda_,
                                   CycleParams params)
    : geom(std::move(g)), lambda(lambda_),
      mg(geom->grid, pullback_field(geom->surface, lambda_), params),
      correction(geom->points, pullback_field(geom->surface, lambda_), geom->grid.h) {}

PotentialResult solve_equivalent_interface(const PotentialContext& ctx,
                                           const PotentialRequest& request) {
  const ProblemGeometry& geom = *ctx.geom;
  const CartesianGrid& g = geom.grid;
  const int m = geom.m();

  JumpData data;
  data.phi = request.jump_phi ? *request.jump_phi : std::vector<double>(m, 0.0);
  data.psi = request.jump_psi ? *request.jump_psi : std::vector<double>(m, 0.0);
  data.fbar.resize(m);
  for (int l = 0; l < m; ++l) {
    const Vec2 q = geom.points.pts[l].xi;
    double fp = request.source_plus ? request.source_plus(q.x, q.y) : 0.0;
    double fm = request.source_minus ? request.source_minus(q.x, q.y) : 0.0;
    data.fbar[l] = fp - fm;
  }
  CorrectionField field = ctx.correction.solve(data);

  // Corrected right-hand side f~ = sqrt(g) F + D and Dirichlet frame data.
  GridFunction rhs = rhs_correction(ctx.mg.fine_op(), geom.cls, field,
                                    geom.patch_of_node);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      int node = g.index(i, j);
      if (!g.interior(i, j)) continue;
      const ScalarField& f =
          geom.cls.plus(node) ? request.source_plus : request.source_minus;
      if (f) rhs[node] += geom.sqrt_g[node] * f(g.x(i), g.y(j));
    }
  }

  PotentialResult res;
  res.u = GridFunction(g);
  if (request.boundary) {
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        if (!g.interior(i, j)) res.u(i, j) = request.boundary(g.x(i), g.y(j));
  }
  res.mg_stats = ctx.mg.solve(rhs, res.u, ctx.mg_tol);

  res.trace_plus.resize(m);
  res.trace_minus.resize(m);
  res.dnu_plus.resize(m);
  res.dnu_minus.resize(m);
  for (int l = 0; l < m; ++l) {
    TraceResult plus = corrected_interpolate(res.u, &field, geom.interp[l],
                                             geom.points.pts[l], +1, g.h);
    TraceResult minus = corrected_interpolate(res.u, &field, geom.interp[l],
                                              geom.points.pts[l], -1, g.h);
    res.trace_plus[l] = plus.value;
    res.dnu_plus[l] = plus.dnu;
    res.trace_minus[l] = minus.value;
    res.dnu_minus[l] = minus.dnu;
  }
  return res;
}

PotentialResult volume_potential(const PotentialContext& ctx, ScalarField f_plus,
                                 ScalarField f_minus, ScalarField boundary) {
  PotentialRequest req;
  req.source_plus = std::move(f_plus);
  req.source_minus = std::move(f_minus);
  req.boundary = std::move(boundary);
  return solve_equivalent_interface(ctx, req);
}

PotentialResult single_layer(const PotentialContext& ctx, const std::vector<double>& psi) {
  std::vector<double> neg(psi.size());
  for (size_t i = 0; i < psi.size(); ++i) neg[i] = -psi[i];
  PotentialRequest req;
  req.jump_psi = &neg;
  return solve_equivalent_interface(ctx, req);
}

PotentialResult double_layer(const PotentialContext& ctx, const std::vector<double>& phi) {
  PotentialRequest req;
  req.jump_phi = &phi;
  return solve_equivalent_interface(ctx, req);
}

std::vector<double> principal_value_K(const PotentialResult& r) {
  std::vector<double> out(r.trace_plus.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = 0.5 * (r.trace_plus[i] + r.trace_minus[i]);
  return out;
}

std::vector<double> adjoint_Kprime(const PotentialResult& r) {
  std::vector<double> out(r.dnu_plus.size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (r.dnu_plus[i] + r.dnu_minus[i]);
  return out;
}

std::vector<double> hypersingular_H(const PotentialResult& r) {
  return adjoint_Kprime(r);
}

}  // namespace kfbi
