#include "kfbi/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace kfbi {

namespace {

// Half-offset evaluation points of the mixed stencils, in units of h.
// Negative-a12 branch.
constexpr double kOffNeg[8][2] = {{-0.5, 1.0}, {-1.0, 0.5},  {0.0, 0.5},
                                  {-0.5, 0.0}, {0.0, -0.5},  {0.5, 0.0},
                                  {0.5, -1.0}, {1.0, -0.5}};
// Positive-a12 branch.
constexpr double kOffPos[8][2] = {{0.5, 1.0},  {-1.0, -0.5}, {0.0, 0.5},
                                  {-0.5, 0.0}, {0.0, -0.5},  {0.5, 0.0},
                                  {-0.5, -1.0}, {1.0, 0.5}};

enum { A, B, C, D, E, F, G, H };

// Stencil offset index for (dx, dy).
constexpr int idx(int dx, int dy) { return (dy + 1) * 3 + (dx + 1); }

}  // namespace

uint16_t SevenPointOperator::pattern(int i, int j) const {
  int node = grid->index(i, j);
  uint16_t mask = 0;
  for (int k = 0; k < 9; ++k)
    if (c[node][k] != 0.0) mask |= (1u << k);
  return mask;
}

void SevenPointOperator::apply(const GridFunction& u, GridFunction& out) const {
  const CartesianGrid& g = *grid;
  const int nx = g.nx(), ny = g.ny();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int node = g.index(i, j);
      if (!g.interior(i, j)) {
        out[node] = 0.0;
        continue;
      }
      const auto& row = c[node];
      double acc = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        int jj = g.periodic_y ? g.wrap_y(j + dy) : j + dy;
        for (int dx = -1; dx <= 1; ++dx) {
          double cc = row[idx(dx, dy)];
          if (cc == 0.0) continue;
          int ii = g.periodic_x ? g.wrap_x(i + dx) : i + dx;
          acc += cc * u[g.index(ii, jj)];
        }
      }
      out[node] = acc;
    }
  }
}

double SevenPointOperator::row_sum(int node) const {
  double s = 0.0;
  for (double v : c[node]) s += v;
  return s;
}

SevenPointOperator build_operator(const CartesianGrid& grid,
                                  const CoefficientField& coeffs) {
  SevenPointOperator op;
  op.grid = &grid;
  op.c.assign(grid.node_count(), {});
  op.branch.assign(grid.node_count(), 0);

  const double h = grid.h;
  const double ih2 = 1.0 / (h * h);
  const int nx = grid.nx(), ny = grid.ny();

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!grid.interior(i, j)) continue;
      const double x = grid.x(i), y = grid.y(j);
      const int node = grid.index(i, j);
      auto& row = op.c[node];

      const double a12c = coeffs.a12(x, y);
      if (coeffs.a11(x, y) * coeffs.a22(x, y) - a12c * a12c <= 0.0)
        fail("indefinite_coefficients",
             "coefficient matrix not positive definite at a grid node");

      // Diagonal part: standard five-point scheme with half-offset samples.
      const double aw = coeffs.a11(x - 0.5 * h, y), ae = coeffs.a11(x + 0.5 * h, y);
      const double as = coeffs.a22(x, y - 0.5 * h), an = coeffs.a22(x, y + 0.5 * h);
      row[idx(-1, 0)] += ih2 * aw;
      row[idx(+1, 0)] += ih2 * ae;
      row[idx(0, -1)] += ih2 * as;
      row[idx(0, +1)] += ih2 * an;
      row[idx(0, 0)] -= ih2 * (aw + ae + as + an) + coeffs.a(x, y);

      // Mixed part, branch chosen by the sign of a12 at the node.
      if (std::abs(a12c) < 1e-14) {
        op.branch[node] = 0;
        continue;
      }
      double v[8];
      if (a12c < 0.0) {
        op.branch[node] = -1;
        for (int k = 0; k < 8; ++k)
          v[k] = coeffs.a12(x + kOffNeg[k][0] * h, y + kOffNeg[k][1] * h);
        const double s = 0.5 * ih2;
        row[idx(-1, +1)] += -s * (v[A] + v[B]);
        row[idx(0, +1)] += s * (v[A] + v[C]);
        row[idx(-1, 0)] += s * (v[B] + v[D]);
        row[idx(0, 0)] += -s * (v[C] + v[D] + v[E] + v[F]);
        row[idx(+1, 0)] += s * (v[H] + v[F]);
        row[idx(0, -1)] += s * (v[E] + v[G]);
        row[idx(+1, -1)] += -s * (v[H] + v[G]);
      } else {
        op.branch[node] = +1;
        for (int k = 0; k < 8; ++k)
          v[k] = coeffs.a12(x + kOffPos[k][0] * h, y + kOffPos[k][1] * h);
        const double s = 0.5 * ih2;
        row[idx(0, +1)] += -s * (v[A] + v[C]);
        row[idx(+1, +1)] += s * (v[A] + v[H]);
        row[idx(-1, 0)] += -s * (v[B] + v[D]);
        row[idx(0, 0)] += s * (v[C] + v[D] + v[E] + v[F]);
        row[idx(+1, 0)] += -s * (v[H] + v[F]);
        row[idx(-1, -1)] += s * (v[B] + v[G]);
        row[idx(0, -1)] += -s * (v[E] + v[G]);
      }
    }
  }
  return op;
}

DenseOperator assemble_dense(const SevenPointOperator& op) {
  const CartesianGrid& g = *op.grid;
  DenseOperator dense;
  std::vector<int> unknown_of_node(g.node_count(), -1);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (g.interior(i, j)) {
        unknown_of_node[g.index(i, j)] = static_cast<int>(dense.unknown_nodes.size());
        dense.unknown_nodes.push_back(g.index(i, j));
      }
  dense.size = static_cast<int>(dense.unknown_nodes.size());
  dense.a.assign(static_cast<size_t>(dense.size) * dense.size, 0.0);

  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!g.interior(i, j)) continue;
      int r = unknown_of_node[g.index(i, j)];
      const auto& row = op.c[g.index(i, j)];
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          double cc = row[(dy + 1) * 3 + (dx + 1)];
          if (cc == 0.0) continue;
          int ii = g.periodic_x ? g.wrap_x(i + dx) : i + dx;
          int jj = g.periodic_y ? g.wrap_y(j + dy) : j + dy;
          if (ii < 0 || ii >= g.nx() || jj < 0 || jj >= g.ny()) continue;
          int col = unknown_of_node[g.index(ii, jj)];
          if (col >= 0) dense.a[static_cast<size_t>(r) * dense.size + col] += cc;
        }
      }
    }
  }
  return dense;
}

MMatrixReport mmatrix_diagnostics(const SevenPointOperator& op) {
  MMatrixReport rep;
  const CartesianGrid& g = *op.grid;
  double scale = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (g.interior(i, j))
        scale = std::max(scale, std::abs(op.c[g.index(i, j)][4]));
  const double tol = 1e-12 * scale;

  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!g.interior(i, j)) continue;
      const auto& row = op.c[g.index(i, j)];
      if (!(row[4] < 0.0)) rep.diag_sign_ok = false;
      double off_abs = 0.0;
      for (int k = 0; k < 9; ++k) {
        if (k == 4) continue;
        if (row[k] < -tol) rep.offdiag_sign_ok = false;
        off_abs += std::abs(row[k]);
      }
      if (off_abs > std::abs(row[4]) + tol) rep.diag_dominant = false;
    }
  }

  if (g.n <= 33) {
    DenseOperator d = assemble_dense(op);
    rep.symmetry_checked = true;
    double max_entry = 0.0, max_asym = 0.0;
    for (int r = 0; r < d.size; ++r) {
      for (int c = r; c < d.size; ++c) {
        double arc = d.a[static_cast<size_t>(r) * d.size + c];
        double acr = d.a[static_cast<size_t>(c) * d.size + r];
        max_entry = std::max(max_entry, std::abs(arc));
        max_asym = std::max(max_asym, std::abs(arc - acr));
      }
    }
    rep.max_asymmetry = max_entry > 0 ? max_asym / max_entry : 0.0;
    rep.symmetric = rep.max_asymmetry <= 1e-12;
  }
  return rep;
}

}  // namespace kfbi
