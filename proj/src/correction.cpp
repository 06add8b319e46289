#include "kfbi/correction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kfbi {

namespace {

// Monomial basis {1, x, y, x^2, y^2, xy} and derivatives, in rescaled
// coordinates z = (p - center)/r.
inline void basis(Vec2 z, double* phi) {
  phi[0] = 1.0;
  phi[1] = z.x;
  phi[2] = z.y;
  phi[3] = z.x * z.x;
  phi[4] = z.y * z.y;
  phi[5] = z.x * z.y;
}

inline void basis_grad(Vec2 z, double r, double* gx, double* gy) {
  gx[0] = 0.0;
  gx[1] = 1.0 / r;
  gx[2] = 0.0;
  gx[3] = 2.0 * z.x / r;
  gx[4] = 0.0;
  gx[5] = z.y / r;
  gy[0] = 0.0;
  gy[1] = 0.0;
  gy[2] = 1.0 / r;
  gy[3] = 0.0;
  gy[4] = 2.0 * z.y / r;
  gy[5] = z.x / r;
}

}  // namespace

CorrectionSolver::CorrectionSolver(const InterfacePointSet& pts,
                                   const CoefficientField& coeffs, double h,
                                   double radius_factor)
    : pts_(&pts), radius_(radius_factor * h) {
  const int m = pts.size();
  const double r = radius_;
  qr_.reserve(m);
  cond_.resize(m);

  for (int l = 0; l < m; ++l) {
    const InterfacePoint& q = pts.pts[l];
    const InterfacePoint& qm = pts.pts[pts.prev(l)];
    const InterfacePoint& qp = pts.pts[pts.next(l)];

    std::vector<double> a(36, 0.0);
    double phi[6], gx[6], gy[6];

    // Three Dirichlet rows at r(0), r(-1), r(+1), scaled by r.
    const Vec2 dpoints[3] = {q.xi, qm.xi, qp.xi};
    for (int s = 0; s < 3; ++s) {
      Vec2 z = (dpoints[s] - q.xi) * (1.0 / r);
      basis(z, phi);
      for (int k = 0; k < 6; ++k) a[s * 6 + k] = r * phi[k];
    }
    // Two Neumann rows at r(-1), r(+1), scaled by r^2.
    const InterfacePoint* npoints[2] = {&qm, &qp};
    for (int s = 0; s < 2; ++s) {
      Vec2 z = (npoints[s]->xi - q.xi) * (1.0 / r);
      basis_grad(z, r, gx, gy);
      for (int k = 0; k < 6; ++k)
        a[(3 + s) * 6 + k] = r * r * (npoints[s]->b1 * gx[k] + npoints[s]->b2 * gy[k]);
    }
    // PDE row at the center, with coefficient derivatives replaced by
    // second-order central differences of the coefficient field.
    {
      double x = q.xi.x, y = q.xi.y;
      double a11 = coeffs.a11(x, y), a12 = coeffs.a12(x, y), a22 = coeffs.a22(x, y);
      double ar = coeffs.a(x, y);
      double d1 = (coeffs.a11(x + h, y) - coeffs.a11(x - h, y)) / (2 * h) +
                  (coeffs.a12(x, y + h) - coeffs.a12(x, y - h)) / (2 * h);
      double d2 = (coeffs.a12(x + h, y) - coeffs.a12(x - h, y)) / (2 * h) +
                  (coeffs.a22(x, y + h) - coeffs.a22(x, y - h)) / (2 * h);
      // At z = 0: d_xx = 2/r^2 on x^2, d_yy = 2/r^2 on y^2, d_xy = 1/r^2 on xy.
      double* row = &a[5 * 6];
      row[0] = -ar;
      row[1] = d1 / r;
      row[2] = d2 / r;
      row[3] = 2.0 * a11 / (r * r);
      row[4] = 2.0 * a22 / (r * r);
      row[5] = 2.0 * a12 / (r * r);
    }

    DenseQR qr(a, 6, 6);
    if (qr.rank_deficient())
      fail("cauchy_rank_deficient",
           "degenerate collocation geometry at interface point " + std::to_string(l));
    cond_[l] = qr.condition_estimate();
    max_cond_ = std::max(max_cond_, cond_[l]);
    qr_.push_back(std::move(qr));
  }
}

CorrectionField CorrectionSolver::solve(const JumpData& data) const {
  const int m = pts_->size();
  CorrectionField field;
  field.patches.resize(m);
  const double r = radius_;
  std::vector<double> b(6);
  for (int l = 0; l < m; ++l) {
    int lm = pts_->prev(l), lp = pts_->next(l);
    b[0] = r * data.phi[l];
    b[1] = r * data.phi[lm];
    b[2] = r * data.phi[lp];
    b[3] = r * r * data.psi[lm];
    b[4] = r * r * data.psi[lp];
    b[5] = data.fbar[l];
    std::vector<double> alpha = qr_[l].solve(b);
    CauchyPatch& p = field.patches[l];
    p.center = pts_->pts[l].xi;
    p.radius = r;
    std::copy(alpha.begin(), alpha.end(), p.alpha.begin());
  }
  return field;
}

std::unordered_map<int, int> assign_patches(const CartesianGrid& grid,
                                            const InterfacePointSet& pts,
                                            const std::vector<int>& nodes) {
  std::unordered_map<int, int> map;
  map.reserve(nodes.size());
  const int m = pts.size();
  for (int node : nodes) {
    if (map.count(node)) continue;
    int i = node % grid.nx(), j = node / grid.nx();
    Vec2 p{grid.x(i), grid.y(j)};
    double best = std::numeric_limits<double>::max();
    int best_l = 0;
    // Strict inequality keeps the lower patch index on equidistant ties.
    for (int l = 0; l < m; ++l) {
      Vec2 d = pts.pts[l].xi - p;
      double d2 = d.dot(d);
      if (d2 < best) {
        best = d2;
        best_l = l;
      }
    }
    map.emplace(node, best_l);
  }
  return map;
}

GridFunction rhs_correction(const SevenPointOperator& op, const NodeClassification& cls,
                            const CorrectionField& field,
                            const std::unordered_map<int, int>& patch_of_node) {
  const CartesianGrid& g = *op.grid;
  GridFunction d(g);
  for (const IrregularNode& rec : cls.irregular_nodes) {
    const auto& row = op.c[rec.node];
    double sum = 0.0;
    for (int k = 0; k < 9; ++k) {
      if (!(rec.opp_mask & (1u << k))) continue;
      int dx = k % 3 - 1, dy = k / 3 - 1;
      int ii = g.periodic_x ? g.wrap_x(rec.i + dx) : rec.i + dx;
      int jj = g.periodic_y ? g.wrap_y(rec.j + dy) : rec.j + dy;
      int nb = g.index(ii, jj);
      auto it = patch_of_node.find(nb);
      if (it == patch_of_node.end())
        fail("missing_patch_assignment", "stencil node lacks a correction patch");
      sum += row[k] * field.eval(it->second, {g.x(ii), g.y(jj)});
    }
    // +side nodes subtract the opposite-side correction, -side nodes add it.
    d[rec.node] = cls.plus(rec.node) ? -sum : sum;
  }
  return d;
}

std::vector<InterpStencil> build_interp_stencils(
    const CartesianGrid& grid, const InterfacePointSet& pts,
    const NodeClassification& cls, const std::unordered_map<int, int>& patch_of_node) {
  std::vector<InterpStencil> out(pts.size());
  for (int l = 0; l < pts.size(); ++l) {
    const Vec2 q = pts.pts[l].xi;
    int ic = static_cast<int>(std::lround((q.x - grid.x0) / grid.h));
    int jc = static_cast<int>(std::lround((q.y - grid.y0) / grid.h));
    if (!grid.periodic_x) ic = std::clamp(ic, 1, grid.n - 1);
    if (!grid.periodic_y) jc = std::clamp(jc, 1, grid.n - 1);

    InterpStencil st;
    std::vector<double> a(9 * 6);
    int k = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx, ++k) {
        int i = grid.periodic_x ? grid.wrap_x(ic + dx) : ic + dx;
        int j = grid.periodic_y ? grid.wrap_y(jc + dy) : jc + dy;
        if (i < 0 || i >= grid.nx() || j < 0 || j >= grid.ny())
          fail("interp_outside_grid", "interpolation block leaves the grid");
        int node = grid.index(i, j);
        st.nodes[k] = node;
        st.side[k] = cls.side[node];
        st.pos[k] = {grid.x(i), grid.y(j)};
        st.z[k] = {(grid.x(i) - q.x) / grid.h, (grid.y(j) - q.y) / grid.h};
        auto it = patch_of_node.find(node);
        st.patch[k] = it != patch_of_node.end() ? it->second : -1;
        double phi[6];
        basis(st.z[k], phi);
        for (int col = 0; col < 6; ++col) a[k * 6 + col] = phi[col];
      }
    }
    st.qr = DenseQR(a, 9, 6);
    out[l] = std::move(st);
  }
  return out;
}

TraceResult corrected_interpolate(const GridFunction& u, const CorrectionField* field,
                                  const InterpStencil& st, const InterfacePoint& point,
                                  int requested_side, double h) {
  std::vector<double> v(9);
  for (int k = 0; k < 9; ++k) {
    double val = u[st.nodes[k]];
    if (st.side[k] != requested_side && field) {
      if (st.patch[k] < 0)
        fail("missing_patch_assignment", "interpolation node lacks a patch");
      double c = field->eval(st.patch[k], st.pos[k]);
      // C = u^+ - u^-: add to opposite-side values when the + extension is
      // requested, subtract when the - extension is requested.
      val += (requested_side > 0) ? c : -c;
    }
    v[k] = val;
  }
  std::vector<double> beta = st.qr.solve(v);
  TraceResult res;
  res.value = beta[0];
  res.dnu = (point.b1 * beta[1] + point.b2 * beta[2]) / h;
  return res;
}

}  // namespace kfbi
