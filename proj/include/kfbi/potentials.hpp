#pragma once

#include <memory>

#include "kfbi/correction.hpp"
#include "kfbi/interface.hpp"
#include "kfbi/krylov.hpp"
#include "kfbi/multigrid.hpp"

namespace kfbi {

/// Everything about (surface, interface curve, grid) that does not depend
/// on the reaction ratio: spline, interface points, node classification,
/// patch assignments and interpolation stencils.  Shared by the potential
/// contexts of both coefficient families of an interface problem.
struct ProblemGeometry {
  ParametricSurface surface;
  CartesianGrid grid;
  SplineCurve spline;
  InterfacePointSet points;
  NodeClassification cls;
  std::unordered_map<int, int> patch_of_node;
  std::vector<InterpStencil> interp;
  std::vector<double> sqrt_g;  // per node

  int m() const { return points.size(); }
};

std::shared_ptr<ProblemGeometry> build_geometry(const ParametricSurface& surface,
                                                const ParametricCurve& curve,
                                                const CartesianGrid& grid);

/// Per-lambda solver state: the seven-point operator (inside the multigrid
/// hierarchy) and the factored Cauchy-patch systems for the operator
/// Delta_S - lambda.
struct PotentialContext {
  std::shared_ptr<ProblemGeometry> geom;
  double lambda = 0;
  Multigrid mg;
  CorrectionSolver correction;
  double mg_tol = 1e-10;

  PotentialContext(std::shared_ptr<ProblemGeometry> g, double lambda_,
                   CycleParams params = {});
  int m() const { return geom->m(); }
};

using ScalarField = std::function<double(double, double)>;

/// Data of one equivalent interface problem (Delta_S - lambda) u = F,
/// [u] = Phi, [conormal flux] = Psi, with optional Dirichlet data on the
/// parameter-domain frame.  Null entries mean identically zero.
struct PotentialRequest {
  ScalarField source_plus;   // F restricted to the + side
  ScalarField source_minus;  // F restricted to the - side
  const std::vector<double>* jump_phi = nullptr;  // Phi at the M points
  const std::vector<double>* jump_psi = nullptr;  // Psi at the M points
  ScalarField boundary;      // outer Dirichlet data (ignored on periodic grids)
};

struct PotentialResult {
  GridFunction u;
  std::vector<double> trace_plus, trace_minus;
  std::vector<double> dnu_plus, dnu_minus;
  SolveStats mg_stats;
};

/// Algorithm-2 evaluation: corrected seven-point discretization, multigrid
/// solve, then corrected one-sided interpolation of traces and conormal
/// derivatives at all interface points.
PotentialResult solve_equivalent_interface(const PotentialContext& ctx,
                                           const PotentialRequest& request);

/// u = V f: F = f, Phi = 0, Psi = 0.
PotentialResult volume_potential(const PotentialContext& ctx, ScalarField f_plus,
                                 ScalarField f_minus, ScalarField boundary = nullptr);
/// u = S psi: F = 0, Phi = 0, Psi = -psi.
PotentialResult single_layer(const PotentialContext& ctx, const std::vector<double>& psi);
/// u = D phi: F = 0, Phi = phi, Psi = 0.
PotentialResult double_layer(const PotentialContext& ctx, const std::vector<double>& phi);

/// K phi = (trace+ + trace-)/2 of the double-layer field.
std::vector<double> principal_value_K(const PotentialResult& double_layer_result);
/// K' psi = (dnu+ + dnu-)/2 of the single-layer field.
std::vector<double> adjoint_Kprime(const PotentialResult& single_layer_result);
/// H phi = (dnu+ + dnu-)/2 of the double-layer field.
std::vector<double> hypersingular_H(const PotentialResult& double_layer_result);

}  // namespace kfbi
