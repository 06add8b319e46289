#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kfbi/geometry.hpp"
#include "kfbi/grid.hpp"

namespace kfbi {

/// Seven-point variable-coefficient operator
///   L_h u = sum_ij d_i(a_ij d_j u) - a u
/// discretized with the five-point diagonal part plus a sign-dependent
/// mixed-term stencil.  Coefficients are stored per node as a 3x3
/// neighborhood, k = (dy+1)*3 + (dx+1); at most 7 entries are nonzero.
struct SevenPointOperator {
  const CartesianGrid* grid = nullptr;
  std::vector<std::array<double, 9>> c;
  std::vector<int8_t> branch;  // sign of a12 at the node: -1, 0, +1

  /// Active stencil offsets at node (i,j) as a 9-bit mask.
  uint16_t pattern(int i, int j) const;

  /// out = L_h u at interior nodes (boundary rows left at zero).  Values at
  /// non-periodic boundary nodes are read from u; ghost values outside the
  /// domain are homogeneous-Dirichlet zero.
  void apply(const GridFunction& u, GridFunction& out) const;

  /// Row sum at a node (equals -a for the divergence-form scheme).
  double row_sum(int idx) const;
};

SevenPointOperator build_operator(const CartesianGrid& grid,
                                  const CoefficientField& coeffs);

/// Dense assembly over unknown nodes (interior for Dirichlet grids, all
/// nodes for fully periodic ones).  Returns the row-major matrix and the
/// node indices of the unknowns.
struct DenseOperator {
  std::vector<double> a;
  std::vector<int> unknown_nodes;
  int size = 0;
};
DenseOperator assemble_dense(const SevenPointOperator& op);

struct MMatrixReport {
  bool symmetric = true;
  bool symmetry_checked = false;
  double max_asymmetry = 0.0;
  bool diag_sign_ok = true;
  bool offdiag_sign_ok = true;
  bool diag_dominant = true;
};

/// Checks -L_h for the M-matrix properties (positive diagonal, nonpositive
/// off-diagonal, weak diagonal dominance); symmetry is verified via dense
/// assembly on grids up to 33 nodes per direction.
MMatrixReport mmatrix_diagnostics(const SevenPointOperator& op);

}  // namespace kfbi
