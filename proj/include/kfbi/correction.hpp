#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include "kfbi/dense.hpp"
#include "kfbi/interface.hpp"
#include "kfbi/stencil.hpp"

namespace kfbi {

/// Cauchy data of the correction function at the M interface points:
/// phi = [u], psi = [conormal flux], fbar = [f].
struct JumpData {
  std::vector<double> phi, psi, fbar;
};

/// Local quadratic solution of the Cauchy problem on one patch, in
/// coordinates rescaled by the patch radius.
struct CauchyPatch {
  Vec2 center;
  double radius = 0;
  std::array<double, 6> alpha{};  // coefficients of {1, x, y, x^2, y^2, xy}

  double eval(Vec2 p) const {
    double zx = (p.x - center.x) / radius, zy = (p.y - center.y) / radius;
    return alpha[0] + alpha[1] * zx + alpha[2] * zy + alpha[3] * zx * zx +
           alpha[4] * zy * zy + alpha[5] * zx * zy;
  }
};

/// Piecewise-polynomial correction field C_h: one patch per interface point,
/// nearest-center partition of unity.
struct CorrectionField {
  std::vector<CauchyPatch> patches;
  double eval(int patch, Vec2 p) const { return patches[patch].eval(p); }
};

/// Pre-factored collocation systems for the local Cauchy problems.  The 6x6
/// matrix of each patch depends only on geometry and coefficients, so it is
/// factored once and reused for every jump-data right-hand side.
class CorrectionSolver {
public:
  /// radius = radius_factor * h; collocation endpoints are the two
  /// neighboring interface points.
  CorrectionSolver(const InterfacePointSet& pts, const CoefficientField& coeffs,
                   double h, double radius_factor = 3.0);

  CorrectionField solve(const JumpData& data) const;

  double radius() const { return radius_; }
  double max_condition() const { return max_cond_; }
  const std::vector<double>& conditions() const { return cond_; }

private:
  const InterfacePointSet* pts_;
  double radius_;
  std::vector<DenseQR> qr_;
  std::vector<double> cond_;
  double max_cond_ = 0.0;
};

/// Nearest-center patch assignment for the given grid nodes.
std::unordered_map<int, int> assign_patches(const CartesianGrid& grid,
                                            const InterfacePointSet& pts,
                                            const std::vector<int>& nodes);

/// Right-hand-side correction D(x,y; C_h): zero at regular nodes, the
/// signed sum of stencil coefficients times C_h over opposite-side stencil
/// members at irregular nodes.
GridFunction rhs_correction(const SevenPointOperator& op, const NodeClassification& cls,
                            const CorrectionField& field,
                            const std::unordered_map<int, int>& patch_of_node);

/// Interpolation stencil at one interface point: the nearest 3x3 node block,
/// its side flags and patch assignments, and the factored least-squares
/// Vandermonde for the local quadratic fit.
struct InterpStencil {
  std::array<int, 9> nodes{};
  std::array<int8_t, 9> side{};
  std::array<int, 9> patch{};
  std::array<Vec2, 9> pos{};  // parameter-plane node positions
  std::array<Vec2, 9> z{};    // (node - q)/h
  DenseQR qr;
};

std::vector<InterpStencil> build_interp_stencils(
    const CartesianGrid& grid, const InterfacePointSet& pts,
    const NodeClassification& cls, const std::unordered_map<int, int>& patch_of_node);

struct TraceResult {
  double value = 0;
  double dnu = 0;
};

/// One-sided trace and conormal derivative at interface point l.  Grid
/// values on the opposite side are shifted by the correction field so all
/// nine samples represent the requested side's smooth extension.
TraceResult corrected_interpolate(const GridFunction& u, const CorrectionField* field,
                                  const InterpStencil& st, const InterfacePoint& point,
                                  int requested_side, double h);

}  // namespace kfbi
