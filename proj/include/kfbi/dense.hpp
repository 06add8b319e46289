#pragma once

#include <vector>

#include "kfbi/common.hpp"

namespace kfbi {

/// Householder QR of a dense m x n matrix (m >= n), factored once and
/// reused for many right-hand sides.  Rank deficiency is detected from the
/// R diagonal; the condition estimate is the |R_ii| extremal ratio.
class DenseQR {
public:
  DenseQR() = default;
  DenseQR(const std::vector<double>& a, int m, int n);  // a is row-major

  /// Least-squares solve min |Ax - b|; b has m entries, returns n entries.
  std::vector<double> solve(const std::vector<double>& b) const;

  bool rank_deficient() const { return rank_deficient_; }
  double condition_estimate() const { return cond_; }

private:
  int m_ = 0, n_ = 0;
  std::vector<double> qr_;      // packed reflectors and strict upper R, row-major
  std::vector<double> beta_;    // Householder scalars
  std::vector<double> r_diag_;  // diagonal of R
  bool rank_deficient_ = false;
  double cond_ = 0.0;
};

struct SmallSolveResult {
  std::vector<double> x;
  double condition_estimate = 0.0;
  bool rank_deficient = false;
};

/// One-shot QR solve of a small square system (the 6x6 collocation systems).
SmallSolveResult qr_solve_small(const std::vector<double>& a, int n,
                                const std::vector<double>& b);

/// Dense LU with partial pivoting; used for the coarsest multigrid level.
class DenseLU {
public:
  DenseLU() = default;
  explicit DenseLU(std::vector<double> a, int n);  // row-major, factored in place
  std::vector<double> solve(const std::vector<double>& b) const;
  bool singular() const { return singular_; }

private:
  int n_ = 0;
  std::vector<double> lu_;
  std::vector<int> piv_;
  bool singular_ = false;
};

}  // namespace kfbi
