#include "kfbi/krylov.hpp"

#include <chrono>
#include <cmath>

namespace kfbi {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

GmresResult gmres(const LinearMap& apply, const std::vector<double>& rhs, double tol,
                  int max_iter) {
  auto t0 = std::chrono::steady_clock::now();
  const size_t n = rhs.size();
  GmresResult res;
  res.x.assign(n, 0.0);

  double beta = nrm2(rhs);
  if (beta == 0.0) return res;

  std::vector<std::vector<double>> v;
  v.push_back(rhs);
  for (double& e : v[0]) e /= beta;

  std::vector<std::vector<double>> hcols;  // Hessenberg columns, length j+2
  std::vector<double> cs, sn;              // Givens rotations
  std::vector<double> g{beta};             // rotated rhs of the LS problem

  int iters = 0;
  double rel = 1.0;
  for (int j = 0; j < max_iter; ++j) {
    std::vector<double> w = apply(v[j]);
    std::vector<double> h(j + 2, 0.0);
    for (int i = 0; i <= j; ++i) {
      h[i] = dot(v[i], w);
      for (size_t k = 0; k < n; ++k) w[k] -= h[i] * v[i][k];
    }
    // Reorthogonalize once if residual overlap with the basis is too large.
    double wn = nrm2(w);
    double overlap = 0.0;
    if (wn > 0.0)
      for (int i = 0; i <= j; ++i) overlap = std::max(overlap, std::abs(dot(v[i], w)) / wn);
    if (overlap > 1e-8) {
      for (int i = 0; i <= j; ++i) {
        double corr = dot(v[i], w);
        h[i] += corr;
        for (size_t k = 0; k < n; ++k) w[k] -= corr * v[i][k];
      }
      wn = nrm2(w);
    }
    h[j + 1] = wn;

    // Apply accumulated rotations to the new column, then form a new one.
    for (int i = 0; i < j; ++i) {
      double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    double denom = std::hypot(h[j], h[j + 1]);
    double c = denom > 0 ? h[j] / denom : 1.0;
    double s = denom > 0 ? h[j + 1] / denom : 0.0;
    cs.push_back(c);
    sn.push_back(s);
    h[j] = denom;
    h[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    hcols.push_back(h);
    iters = j + 1;
    rel = std::abs(g[j + 1]) / beta;
    if (rel <= tol) break;
    if (wn == 0.0) break;  // happy breakdown: exact solution in the basis
    v.push_back(w);
    for (double& e : v[j + 1]) e /= wn;
  }
  if (rel > tol)
    fail("gmres_max_iterations",
         "GMRES did not reach tolerance in " + std::to_string(max_iter) +
             " iterations (residual " + std::to_string(rel) + ")");

  // Back substitution for the triangularized least-squares system.
  std::vector<double> y(iters, 0.0);
  for (int i = iters - 1; i >= 0; --i) {
    double s = g[i];
    for (int k = i + 1; k < iters; ++k) s -= hcols[k][i] * y[k];
    y[i] = s / hcols[i][i];
  }
  for (int i = 0; i < iters; ++i)
    for (size_t k = 0; k < n; ++k) res.x[k] += y[i] * v[i][k];

  res.stats.iterations = iters;
  res.stats.final_residual = rel;
  auto t1 = std::chrono::steady_clock::now();
  res.stats.wall_time = std::chrono::duration<double>(t1 - t0).count();
  return res;
}

}  // namespace kfbi
