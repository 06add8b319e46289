#include "kfbi/bie.hpp"

#include <chrono>
#include <cmath>

namespace kfbi {

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ScalarField scaled(const ScalarField& f, double s) {
  if (!f) return nullptr;
  return [f, s](double x, double y) { return s * f(x, y); };
}

}  // namespace

BieSolver::BieSolver(const ParametricSurface& surface, const ParametricCurve& curve,
                     const CartesianGrid& grid, const ProblemSpec& spec,
                     double gmres_tol, int gmres_max_iter)
    : spec_(spec), tol_(gmres_tol), max_iter_(gmres_max_iter) {
  const bool bvp =
      spec.kind == ProblemKind::dirichlet_bvp || spec.kind == ProblemKind::neumann_bvp;
  if (bvp) {
    if (spec.kappa_plus < 0) fail("invalid_spec", "BVP requires kappa >= 0");
    if (spec.kind == ProblemKind::neumann_bvp && spec.kappa_plus <= 0)
      fail("invalid_spec", "Neumann BVP requires kappa > 0 (kappa = 0 is out of scope)");
  } else {
    if (spec.beta_plus <= 0 || spec.beta_minus <= 0)
      fail("invalid_spec", "interface problems require beta > 0 on both sides");
    if (spec.kappa_plus < 0 || spec.kappa_minus < 0)
      fail("invalid_spec", "negative reaction coefficient");
    if (grid.periodic_x && grid.periodic_y && spec.kappa_plus == 0 &&
        spec.kappa_minus == 0)
      fail("invalid_spec",
           "closed-surface interface problem with kappa = 0 on both sides has a "
           "nontrivial nullspace");
  }

  geom_ = build_geometry(surface, curve, grid);
  double lambda_plus = bvp ? spec.kappa_plus : spec.kappa_plus / spec.beta_plus;
  double lambda_minus = bvp ? lambda_plus : spec.kappa_minus / spec.beta_minus;
  ctx_plus_ = std::make_shared<PotentialContext>(geom_, lambda_plus);
  if (std::abs(lambda_minus - lambda_plus) <=
      1e-14 * std::max(std::abs(lambda_plus), 1.0))
    ctx_minus_ = ctx_plus_;
  else
    ctx_minus_ = std::make_shared<PotentialContext>(geom_, lambda_minus);
}

std::vector<double> BieSolver::sample(const ScalarField& f) const {
  const int m = geom_->m();
  std::vector<double> out(m, 0.0);
  if (!f) return out;
  for (int l = 0; l < m; ++l) {
    Vec2 q = geom_->points.pts[l].xi;
    out[l] = f(q.x, q.y);
  }
  return out;
}

BieSolution BieSolver::solve() {
  switch (spec_.kind) {
    case ProblemKind::dirichlet_bvp:
      return solve_dirichlet();
    case ProblemKind::neumann_bvp:
      return solve_neumann();
    case ProblemKind::interface_equal_ratio:
      try {
        return solve_interface_equal_ratio();
      } catch (const Error& e) {
        if (e.code() == "ratio_mismatch") return solve_interface_generic();
        throw;
      }
    case ProblemKind::interface_generic:
      return solve_interface_generic();
  }
  fail("invalid_spec", "unknown problem kind");
}

std::vector<double> BieSolver::dirichlet_operator(const std::vector<double>& phi) const {
  // (1/2 I + K) phi, evaluated as the one-sided trace D phi |_{Gamma+}.
  return double_layer(*ctx_plus_, phi).trace_plus;
}

std::vector<double> BieSolver::neumann_operator(const std::vector<double>& psi) const {
  // (1/2 I - K') psi = -d_nu (S psi) |_{Gamma+}.
  std::vector<double> out = single_layer(*ctx_plus_, psi).dnu_plus;
  for (double& v : out) v = -v;
  return out;
}

BieSolution BieSolver::solve_dirichlet() {
  double t0 = now_seconds();
  const int m = geom_->m();

  PotentialResult vol = volume_potential(*ctx_plus_, spec_.f_plus, nullptr);
  std::vector<double> rhs = sample(spec_.g_dirichlet);
  for (int l = 0; l < m; ++l) rhs[l] -= vol.trace_plus[l];

  GmresResult gm = gmres([this](const std::vector<double>& x) {
    return dirichlet_operator(x);
  }, rhs, tol_, max_iter_);

  // u = V f + D phi.
  PotentialRequest rec;
  rec.source_plus = spec_.f_plus;
  rec.jump_phi = &gm.x;
  PotentialResult full = solve_equivalent_interface(*ctx_plus_, rec);

  BieSolution sol;
  sol.u = std::move(full.u);
  sol.density = std::move(gm.x);
  sol.gmres = gm.stats;
  sol.solve_seconds = now_seconds() - t0;
  return sol;
}

BieSolution BieSolver::solve_neumann() {
  double t0 = now_seconds();
  const int m = geom_->m();

  PotentialResult vol = volume_potential(*ctx_plus_, spec_.f_plus, nullptr);
  std::vector<double> rhs = sample(spec_.g_flux);
  for (int l = 0; l < m; ++l) rhs[l] -= vol.dnu_plus[l];

  GmresResult gm = gmres([this](const std::vector<double>& x) {
    return neumann_operator(x);
  }, rhs, tol_, max_iter_);

  // u = V f - S psi; the field with flux jump +psi is -S psi.
  PotentialRequest rec;
  rec.source_plus = spec_.f_plus;
  rec.jump_psi = &gm.x;
  PotentialResult full = solve_equivalent_interface(*ctx_plus_, rec);

  BieSolution sol;
  sol.u = std::move(full.u);
  sol.density = std::move(gm.x);
  sol.gmres = gm.stats;
  sol.solve_seconds = now_seconds() - t0;
  return sol;
}

std::vector<double> BieSolver::interface_equal_ratio_operator(
    const std::vector<double>& psi) const {
  const double atwood =
      (spec_.beta_plus - spec_.beta_minus) / (spec_.beta_plus + spec_.beta_minus);
  std::vector<double> kp = adjoint_Kprime(single_layer(*ctx_plus_, psi));
  std::vector<double> out(psi.size());
  for (size_t l = 0; l < psi.size(); ++l) out[l] = psi[l] - 2.0 * atwood * kp[l];
  return out;
}

BieSolution BieSolver::solve_interface_equal_ratio() {
  double lp = spec_.kappa_plus / spec_.beta_plus;
  double lm = spec_.kappa_minus / spec_.beta_minus;
  if (std::abs(lp - lm) > 1e-12 * std::max({std::abs(lp), std::abs(lm), 1.0}))
    fail("ratio_mismatch",
         "kappa/beta differs across the interface; use the generic solver");

  double t0 = now_seconds();
  const int m = geom_->m();
  const double bsum = spec_.beta_plus + spec_.beta_minus;
  const double atwood = (spec_.beta_plus - spec_.beta_minus) / bsum;

  // Fixed part D g1 + V f^ with the outer boundary data folded into V.
  std::vector<double> g1 = sample(spec_.g_dirichlet);
  PotentialRequest fixed;
  fixed.source_plus = scaled(spec_.f_plus, 1.0 / spec_.beta_plus);
  fixed.source_minus = scaled(spec_.f_minus, 1.0 / spec_.beta_minus);
  fixed.jump_phi = &g1;
  fixed.boundary = spec_.boundary;
  PotentialResult fx = solve_equivalent_interface(*ctx_plus_, fixed);
  std::vector<double> hflux = adjoint_Kprime(fx);  // H g1 + d_nu V f^

  std::vector<double> rhs = sample(spec_.g_flux);
  for (int l = 0; l < m; ++l) rhs[l] = 2.0 * rhs[l] / bsum - 2.0 * atwood * hflux[l];

  GmresResult gm = gmres([this](const std::vector<double>& x) {
    return interface_equal_ratio_operator(x);
  }, rhs, tol_, max_iter_);

  // u = D g1 - S psi + V f^: trace jump g1, flux jump +psi.
  PotentialRequest rec = fixed;
  rec.jump_psi = &gm.x;
  PotentialResult full = solve_equivalent_interface(*ctx_plus_, rec);

  BieSolution sol;
  sol.u = std::move(full.u);
  sol.density = std::move(gm.x);
  sol.gmres = gm.stats;
  sol.solve_seconds = now_seconds() - t0;
  return sol;
}

std::vector<double> BieSolver::interface_generic_operator(
    const std::vector<double>& phi_psi) const {
  const int m = geom_->m();
  const double sigma = spec_.beta_minus / spec_.beta_plus;
  const double c2 = 2.0 * spec_.beta_plus / (spec_.beta_plus + spec_.beta_minus);

  std::vector<double> phi(phi_psi.begin(), phi_psi.begin() + m);
  std::vector<double> psi(phi_psi.begin() + m, phi_psi.end());

  // Interior-family field D+ phi - S+ (sigma psi) and exterior-family field
  // D- phi - S- psi carry all operator blocks via their trace and flux
  // averages.
  std::vector<double> spsi(m);
  for (int l = 0; l < m; ++l) spsi[l] = sigma * psi[l];
  PotentialRequest rp;
  rp.jump_phi = &phi;
  rp.jump_psi = &spsi;
  PotentialResult wp = solve_equivalent_interface(*ctx_plus_, rp);

  PotentialRequest rm;
  rm.jump_phi = &phi;
  rm.jump_psi = &psi;
  PotentialResult wm = solve_equivalent_interface(*ctx_minus_, rm);

  std::vector<double> out(2 * m);
  for (int l = 0; l < m; ++l) {
    double tp = 0.5 * (wp.trace_plus[l] + wp.trace_minus[l]);
    double tm = 0.5 * (wm.trace_plus[l] + wm.trace_minus[l]);
    double fp = 0.5 * (wp.dnu_plus[l] + wp.dnu_minus[l]);
    double fm = 0.5 * (wm.dnu_plus[l] + wm.dnu_minus[l]);
    out[l] = phi[l] - tp + tm;
    out[m + l] = psi[l] - c2 * fp + c2 * fm;
  }
  return out;
}

BieSolution BieSolver::solve_interface_generic() {
  double t0 = now_seconds();
  const int m = geom_->m();
  const double sigma = spec_.beta_minus / spec_.beta_plus;
  const double c2 = 2.0 * spec_.beta_plus / (spec_.beta_plus + spec_.beta_minus);

  // Densities: phi = u_i|_Gamma, psi = nu . grad_S u_e|_Gamma.  The jump
  // conditions give u_e|_Gamma = phi - g1 and nu . grad_S u_i =
  // (g2 + beta- psi)/beta+.
  std::vector<double> g1 = sample(spec_.g_dirichlet);
  std::vector<double> g2s = sample(spec_.g_flux);
  for (double& v : g2s) v /= spec_.beta_plus;  // g2 / beta+

  // field_a = V+ F+ - S+ (g2/beta+), zero frame data.
  PotentialRequest ra;
  ra.source_plus = scaled(spec_.f_plus, 1.0 / spec_.beta_plus);
  ra.jump_psi = &g2s;
  PotentialResult fa = solve_equivalent_interface(*ctx_plus_, ra);

  // field_b = V- F- + D- g1, with the outer boundary data.
  PotentialRequest rb;
  rb.source_minus = scaled(spec_.f_minus, 1.0 / spec_.beta_minus);
  rb.jump_phi = &g1;
  rb.boundary = spec_.boundary;
  PotentialResult fb = solve_equivalent_interface(*ctx_minus_, rb);

  std::vector<double> rhs(2 * m);
  for (int l = 0; l < m; ++l) {
    rhs[l] = fa.trace_plus[l] + fb.trace_plus[l];
    rhs[m + l] = c2 * (fa.dnu_minus[l] +
                       0.5 * (fb.dnu_plus[l] + fb.dnu_minus[l]));
  }

  GmresResult gm = gmres([this](const std::vector<double>& x) {
    return interface_generic_operator(x);
  }, rhs, tol_, max_iter_);

  std::vector<double> phi(gm.x.begin(), gm.x.begin() + m);
  std::vector<double> psi(gm.x.begin() + m, gm.x.end());

  // u_i = V+ F+ + D+ phi - S+ ((g2 + beta- psi)/beta+)  on the + side,
  // u_e = V- F- - D- (phi - g1) + S- psi                on the - side.
  std::vector<double> psi_i(m), phi_e(m), psi_e(m);
  for (int l = 0; l < m; ++l) {
    psi_i[l] = g2s[l] + sigma * psi[l];
    phi_e[l] = g1[l] - phi[l];
    psi_e[l] = -psi[l];
  }
  PotentialRequest ri;
  ri.source_plus = scaled(spec_.f_plus, 1.0 / spec_.beta_plus);
  ri.jump_phi = &phi;
  ri.jump_psi = &psi_i;
  PotentialResult ui = solve_equivalent_interface(*ctx_plus_, ri);

  PotentialRequest re;
  re.source_minus = scaled(spec_.f_minus, 1.0 / spec_.beta_minus);
  re.jump_phi = &phi_e;
  re.jump_psi = &psi_e;
  re.boundary = spec_.boundary;
  PotentialResult ue = solve_equivalent_interface(*ctx_minus_, re);

  BieSolution sol;
  sol.u = GridFunction(geom_->grid);
  const CartesianGrid& g = geom_->grid;
  for (int node = 0; node < g.node_count(); ++node)
    sol.u[node] = geom_->cls.plus(node) ? ui.u[node] : ue.u[node];
  sol.density = std::move(gm.x);
  sol.gmres = gm.stats;
  sol.solve_seconds = now_seconds() - t0;
  return sol;
}

}  // namespace kfbi
