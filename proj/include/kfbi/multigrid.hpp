#pragma once

#include <memory>
#include <vector>

#include "kfbi/dense.hpp"
#include "kfbi/stencil.hpp"

namespace kfbi {

struct SolveStats {
  int iterations = 0;
  double final_residual = 0.0;  // relative 2-norm
  double wall_time = 0.0;       // seconds
};

struct CycleParams {
  int pre_smooth = 2;
  int post_smooth = 2;
  int max_cycles = 60;
  int coarsest = 8;  // stop coarsening at this many subdivisions
  bool fmg = true;   // full-multigrid initialization
};

/// Geometric multigrid for the seven-point operator.  Coarse levels halve N
/// and are rediscretized from the coefficient field (not Galerkin products).
/// Smoothing is lexicographic Gauss-Seidel; the coarsest level is solved by
/// dense elimination.
class Multigrid {
public:
  Multigrid(const CartesianGrid& fine, const CoefficientField& coeffs,
            CycleParams params = {});

  /// Solves L_h u = rhs to a relative residual <= tol.  Dirichlet boundary
  /// values are taken from u as given on entry (periodic grids ignore
  /// them); the interior of u serves as the initial guess.
  SolveStats solve(const GridFunction& rhs, GridFunction& u, double tol = 1e-10) const;

  const SevenPointOperator& fine_op() const { return levels_.front().op; }
  const CartesianGrid& fine_grid() const { return *levels_.front().grid; }
  int level_count() const { return static_cast<int>(levels_.size()); }

private:
  struct Level {
    std::unique_ptr<CartesianGrid> grid;
    SevenPointOperator op;
  };

  void smooth(int lev, GridFunction& u, const GridFunction& f, int sweeps) const;
  void residual(int lev, const GridFunction& u, const GridFunction& f,
                GridFunction& r) const;
  void restrict_full_weighting(int lev, const GridFunction& fine,
                               GridFunction& coarse) const;
  void prolong_add(int lev, const GridFunction& coarse, GridFunction& fine) const;
  void coarse_solve(GridFunction& u, const GridFunction& f) const;
  void v_cycle(int lev, GridFunction& u, const GridFunction& f) const;

  std::vector<Level> levels_;
  DenseLU coarse_lu_;
  std::vector<int> coarse_unknowns_;
  CycleParams params_;
};

}  // namespace kfbi
