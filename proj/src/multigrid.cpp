#include "kfbi/multigrid.hpp"

#include <chrono>
#include <cmath>

namespace kfbi {

namespace {

double norm2(const GridFunction& v, const CartesianGrid& g) {
  double s = 0.0;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      if (g.interior(i, j)) {
        double x = v[g.index(i, j)];
        s += x * x;
      }
  return std::sqrt(s);
}

}  // namespace

Multigrid::Multigrid(const CartesianGrid& fine, const CoefficientField& coeffs,
                     CycleParams params)
    : params_(params) {
  int n = fine.n;
  while (true) {
    Level lev;
    lev.grid = std::make_unique<CartesianGrid>(fine.x0, fine.x1, fine.y0, fine.y1, n,
                                               fine.periodic_x, fine.periodic_y);
    lev.op = build_operator(*lev.grid, coeffs);
    levels_.push_back(std::move(lev));
    if (n % 2 != 0 || n / 2 < params_.coarsest) break;
    n /= 2;
  }

  // Refuse singular periodic problems (pure Neumann-like nullspace).
  const Level& fl = levels_.front();
  if (fl.grid->periodic_x && fl.grid->periodic_y) {
    double max_diag = 0.0, max_rowsum = 0.0;
    for (int j = 0; j < fl.grid->ny(); ++j)
      for (int i = 0; i < fl.grid->nx(); ++i) {
        int idx = fl.grid->index(i, j);
        max_diag = std::max(max_diag, std::abs(fl.op.c[idx][4]));
        max_rowsum = std::max(max_rowsum, std::abs(fl.op.row_sum(idx)));
      }
    if (max_rowsum <= 1e-12 * max_diag)
      fail("mg_indefinite",
           "periodic operator with zero reaction term has a constant nullspace");
  }

  const Level& cl = levels_.back();
  DenseOperator dense = assemble_dense(cl.op);
  coarse_unknowns_ = dense.unknown_nodes;
  coarse_lu_ = DenseLU(std::move(dense.a), dense.size);
  if (coarse_lu_.singular())
    fail("mg_indefinite", "coarsest-level operator is singular");
}

void Multigrid::smooth(int lev, GridFunction& u, const GridFunction& f,
                       int sweeps) const {
  const CartesianGrid& g = *levels_[lev].grid;
  const SevenPointOperator& op = levels_[lev].op;
  const int nx = g.nx(), ny = g.ny();
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int j = 0; j < ny; ++j) {
      if (!g.periodic_y && (j == 0 || j == g.n)) continue;
      for (int i = 0; i < nx; ++i) {
        if (!g.periodic_x && (i == 0 || i == g.n)) continue;
        int node = g.index(i, j);
        const auto& row = op.c[node];
        double acc = f[node];
        for (int dy = -1; dy <= 1; ++dy) {
          int jj = g.periodic_y ? g.wrap_y(j + dy) : j + dy;
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            double cc = row[(dy + 1) * 3 + (dx + 1)];
            if (cc == 0.0) continue;
            int ii = g.periodic_x ? g.wrap_x(i + dx) : i + dx;
            acc -= cc * u[g.index(ii, jj)];
          }
        }
        u[node] = acc / row[4];
      }
    }
  }
}

void Multigrid::residual(int lev, const GridFunction& u, const GridFunction& f,
                         GridFunction& r) const {
  const CartesianGrid& g = *levels_[lev].grid;
  levels_[lev].op.apply(u, r);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      int node = g.index(i, j);
      r[node] = g.interior(i, j) ? f[node] - r[node] : 0.0;
    }
}

void Multigrid::restrict_full_weighting(int lev, const GridFunction& fine,
                                        GridFunction& coarse) const {
  const CartesianGrid& gf = *levels_[lev].grid;
  const CartesianGrid& gc = *levels_[lev + 1].grid;
  auto fval = [&](int i, int j) -> double {
    if (gf.periodic_x) i = gf.wrap_x(i);
    if (gf.periodic_y) j = gf.wrap_y(j);
    if (i < 0 || i >= gf.nx() || j < 0 || j >= gf.ny()) return 0.0;
    return fine[gf.index(i, j)];
  };
  for (int J = 0; J < gc.ny(); ++J) {
    for (int I = 0; I < gc.nx(); ++I) {
      if (!gc.interior(I, J)) {
        coarse[gc.index(I, J)] = 0.0;
        continue;
      }
      int i = 2 * I, j = 2 * J;
      coarse[gc.index(I, J)] =
          (4.0 * fval(i, j) +
           2.0 * (fval(i - 1, j) + fval(i + 1, j) + fval(i, j - 1) + fval(i, j + 1)) +
           fval(i - 1, j - 1) + fval(i + 1, j - 1) + fval(i - 1, j + 1) +
           fval(i + 1, j + 1)) /
          16.0;
    }
  }
}

void Multigrid::prolong_add(int lev, const GridFunction& coarse,
                            GridFunction& fine) const {
  const CartesianGrid& gf = *levels_[lev].grid;
  const CartesianGrid& gc = *levels_[lev + 1].grid;
  auto cval = [&](int I, int J) -> double {
    if (gc.periodic_x) I = gc.wrap_x(I);
    if (gc.periodic_y) J = gc.wrap_y(J);
    if (I < 0 || I >= gc.nx() || J < 0 || J >= gc.ny()) return 0.0;
    return coarse[gc.index(I, J)];
  };
  for (int j = 0; j < gf.ny(); ++j) {
    for (int i = 0; i < gf.nx(); ++i) {
      if (!gf.interior(i, j)) continue;
      int I = i / 2, J = j / 2;
      double v;
      if (i % 2 == 0 && j % 2 == 0)
        v = cval(I, J);
      else if (i % 2 == 1 && j % 2 == 0)
        v = 0.5 * (cval(I, J) + cval(I + 1, J));
      else if (i % 2 == 0)
        v = 0.5 * (cval(I, J) + cval(I, J + 1));
      else
        v = 0.25 * (cval(I, J) + cval(I + 1, J) + cval(I, J + 1) + cval(I + 1, J + 1));
      fine[gf.index(i, j)] += v;
    }
  }
}

void Multigrid::coarse_solve(GridFunction& u, const GridFunction& f) const {
  std::vector<double> rhs(coarse_unknowns_.size());
  for (size_t k = 0; k < coarse_unknowns_.size(); ++k) rhs[k] = f[coarse_unknowns_[k]];
  std::vector<double> x = coarse_lu_.solve(rhs);
  for (double& v : u.values) v = 0.0;
  for (size_t k = 0; k < coarse_unknowns_.size(); ++k) u[coarse_unknowns_[k]] = x[k];
}

void Multigrid::v_cycle(int lev, GridFunction& u, const GridFunction& f) const {
  if (lev == static_cast<int>(levels_.size()) - 1) {
    coarse_solve(u, f);
    return;
  }
  smooth(lev, u, f, params_.pre_smooth);
  GridFunction r(*levels_[lev].grid);
  residual(lev, u, f, r);
  GridFunction fc(*levels_[lev + 1].grid), ec(*levels_[lev + 1].grid);
  restrict_full_weighting(lev, r, fc);
  v_cycle(lev + 1, ec, fc);
  prolong_add(lev, ec, u);
  smooth(lev, u, f, params_.post_smooth);
}

SolveStats Multigrid::solve(const GridFunction& rhs, GridFunction& u,
                            double tol) const {
  auto t0 = std::chrono::steady_clock::now();
  const CartesianGrid& g = *levels_.front().grid;
  SolveStats stats;

  GridFunction r(g);
  residual(0, u, rhs, r);
  double fnorm = norm2(rhs, g);
  double r0 = norm2(r, g);
  double denom = fnorm > 0.0 ? fnorm : r0;
  if (denom == 0.0) {
    stats.final_residual = 0.0;
    return stats;
  }

  if (params_.fmg) {
    // FMG on the error equation: nested coarse solutions of the initial
    // residual serve as the fine-level initial correction.
    int nl = static_cast<int>(levels_.size());
    std::vector<GridFunction> fs, es;
    fs.reserve(nl);
    es.reserve(nl);
    for (int l = 0; l < nl; ++l) {
      fs.emplace_back(*levels_[l].grid);
      es.emplace_back(*levels_[l].grid);
    }
    fs[0] = r;
    for (int l = 0; l + 1 < nl; ++l) restrict_full_weighting(l, fs[l], fs[l + 1]);
    coarse_solve(es[nl - 1], fs[nl - 1]);
    for (int l = nl - 2; l >= 0; --l) {
      prolong_add(l, es[l + 1], es[l]);
      v_cycle(l, es[l], fs[l]);
    }
    for (int k = 0; k < g.node_count(); ++k) u[k] += es[0][k];
  }

  for (int cycle = 0; cycle < params_.max_cycles; ++cycle) {
    residual(0, u, rhs, r);
    double rn = norm2(r, g) / denom;
    stats.final_residual = rn;
    stats.iterations = cycle;
    if (rn <= tol) {
      auto t1 = std::chrono::steady_clock::now();
      stats.wall_time = std::chrono::duration<double>(t1 - t0).count();
      return stats;
    }
    v_cycle(0, u, rhs);
  }
  residual(0, u, rhs, r);
  stats.final_residual = norm2(r, g) / denom;
  if (stats.final_residual > tol)
    fail("mg_no_convergence", "multigrid failed to reach tolerance in " +
                                  std::to_string(params_.max_cycles) + " cycles");
  auto t1 = std::chrono::steady_clock::now();
  stats.iterations = params_.max_cycles;
  stats.wall_time = std::chrono::duration<double>(t1 - t0).count();
  return stats;
}

}  // namespace kfbi
