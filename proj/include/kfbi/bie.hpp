#pragma once

#include <memory>
#include <optional>
#include <string>

#include "kfbi/potentials.hpp"

namespace kfbi {

enum class ProblemKind { dirichlet_bvp, neumann_bvp, interface_equal_ratio,
                         interface_generic };

/// A boundary-value or interface problem on a parameterized surface.
/// For BVPs only the + coefficients, f_plus and g_dirichlet/g_flux are used;
/// interface problems read g_dirichlet as g1 and g_flux as g2.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::dirichlet_bvp;
  double kappa_plus = 0, kappa_minus = 0;
  double beta_plus = 1, beta_minus = 1;
  ScalarField g_dirichlet;  // g_D (Dirichlet BVP) or g1 (interface)
  ScalarField g_flux;       // g_N (Neumann BVP) or g2 (interface)
  ScalarField f_plus, f_minus;
  ScalarField boundary;     // Dirichlet data on the parameter-domain frame
};

struct BieSolution {
  GridFunction u;                // u_i on + nodes, u_e on - nodes (BVP: + only)
  std::vector<double> density;   // M values, or 2M for the generic system
  SolveStats gmres;
  double solve_seconds = 0;      // wall time of the solve phase
};

/// Boundary-integral solvers over one geometry.  Contexts for the one or two
/// reaction ratios are built once; each solve is a GMRES run whose operator
/// applications are equivalent-interface solves.
class BieSolver {
public:
  BieSolver(const ParametricSurface& surface, const ParametricCurve& curve,
            const CartesianGrid& grid, const ProblemSpec& spec,
            double gmres_tol = 1e-8, int gmres_max_iter = 100);

  /// Dispatch on spec.kind; equal-ratio specs whose ratios mismatch raise
  /// ratio_mismatch from the equal-ratio path (callers may re-route).
  BieSolution solve();

  BieSolution solve_dirichlet();
  BieSolution solve_neumann();
  BieSolution solve_interface_equal_ratio();
  BieSolution solve_interface_generic();

  // BIE operator applications, exposed for spectrum and consistency tests.
  std::vector<double> dirichlet_operator(const std::vector<double>& phi) const;
  std::vector<double> neumann_operator(const std::vector<double>& psi) const;
  std::vector<double> interface_equal_ratio_operator(const std::vector<double>& psi) const;
  std::vector<double> interface_generic_operator(const std::vector<double>& phi_psi) const;

  const ProblemGeometry& geometry() const { return *geom_; }
  const PotentialContext& context_plus() const { return *ctx_plus_; }
  const PotentialContext& context_minus() const { return *ctx_minus_; }
  int m() const { return geom_->m(); }

private:
  std::vector<double> sample(const ScalarField& f) const;

  ProblemSpec spec_;
  std::shared_ptr<ProblemGeometry> geom_;
  std::shared_ptr<PotentialContext> ctx_plus_;
  std::shared_ptr<PotentialContext> ctx_minus_;  // aliases ctx_plus_ when ratios match
  double tol_;
  int max_iter_;
};

}  // namespace kfbi
