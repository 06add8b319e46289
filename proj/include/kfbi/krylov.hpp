#pragma once

#include <functional>
#include <vector>

#include "kfbi/multigrid.hpp"

namespace kfbi {

using LinearMap = std::function<std::vector<double>(const std::vector<double>&)>;

struct GmresResult {
  std::vector<double> x;
  SolveStats stats;
};

/// Matrix-free GMRES without restarts: zero initial guess, modified
/// Gram-Schmidt with one reorthogonalization pass when the loss of
/// orthogonality exceeds 1e-8.  Throws gmres_max_iterations on failure.
GmresResult gmres(const LinearMap& apply, const std::vector<double>& rhs,
                  double tol = 1e-8, int max_iter = 100);

}  // namespace kfbi
