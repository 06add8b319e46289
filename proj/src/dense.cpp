#include "kfbi/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kfbi {

DenseQR::DenseQR(const std::vector<double>& a, int m, int n)
    : m_(m), n_(n), qr_(a), beta_(n, 0.0) {
  if (static_cast<int>(a.size()) != m * n || m < n)
    fail("qr_shape", "bad dimensions for QR factorization");
  double rmax = 0.0, rmin = 0.0;
  for (int k = 0; k < n_; ++k) {
    // Householder vector for column k, rows k..m-1.
    double norm = 0.0;
    for (int i = k; i < m_; ++i) norm += qr_[i * n_ + k] * qr_[i * n_ + k];
    norm = std::sqrt(norm);
    double akk = qr_[k * n_ + k];
    double alpha = (akk >= 0 ? -norm : norm);
    if (norm == 0.0) {
      beta_[k] = 0.0;
    } else {
      double v0 = akk - alpha;
      qr_[k * n_ + k] = v0;
      double vnorm2 = 0.0;
      for (int i = k; i < m_; ++i) vnorm2 += qr_[i * n_ + k] * qr_[i * n_ + k];
      beta_[k] = (vnorm2 == 0.0) ? 0.0 : 2.0 / vnorm2;
      // Apply reflector to the trailing columns.
      for (int j = k + 1; j < n_; ++j) {
        double s = 0.0;
        for (int i = k; i < m_; ++i) s += qr_[i * n_ + k] * qr_[i * n_ + j];
        s *= beta_[k];
        for (int i = k; i < m_; ++i) qr_[i * n_ + j] -= s * qr_[i * n_ + k];
      }
    }
    double rkk = std::abs(alpha);
    if (k == 0) {
      rmax = rmin = rkk;
    } else {
      rmax = std::max(rmax, rkk);
      rmin = std::min(rmin, rkk);
    }
    r_diag_.push_back(alpha);
  }
  cond_ = (rmin > 0.0) ? rmax / rmin : std::numeric_limits<double>::infinity();
  rank_deficient_ = !(rmin > rmax * 1e-14) || rmax == 0.0;
}

std::vector<double> DenseQR::solve(const std::vector<double>& b) const {
  if (static_cast<int>(b.size()) != m_) fail("qr_shape", "rhs size mismatch");
  std::vector<double> y(b);
  // y <- Q^T b
  for (int k = 0; k < n_; ++k) {
    if (beta_[k] == 0.0) continue;
    double s = 0.0;
    for (int i = k; i < m_; ++i) s += qr_[i * n_ + k] * y[i];
    s *= beta_[k];
    for (int i = k; i < m_; ++i) y[i] -= s * qr_[i * n_ + k];
  }
  // Back substitution with R (diagonal kept separately).
  std::vector<double> x(n_, 0.0);
  for (int i = n_ - 1; i >= 0; --i) {
    double s = y[i];
    for (int j = i + 1; j < n_; ++j) s -= qr_[i * n_ + j] * x[j];
    double d = r_diag_[i];
    x[i] = (d != 0.0) ? s / d : 0.0;
  }
  return x;
}

SmallSolveResult qr_solve_small(const std::vector<double>& a, int n,
                                const std::vector<double>& b) {
  DenseQR qr(a, n, n);
  SmallSolveResult res;
  res.x = qr.solve(b);
  res.condition_estimate = qr.condition_estimate();
  res.rank_deficient = qr.rank_deficient();
  return res;
}

DenseLU::DenseLU(std::vector<double> a, int n) : n_(n), lu_(std::move(a)), piv_(n) {
  for (int i = 0; i < n_; ++i) piv_[i] = i;
  for (int k = 0; k < n_; ++k) {
    int p = k;
    double best = std::abs(lu_[k * n_ + k]);
    for (int i = k + 1; i < n_; ++i) {
      double v = std::abs(lu_[i * n_ + k]);
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) {
      singular_ = true;
      return;
    }
    if (p != k) {
      for (int j = 0; j < n_; ++j) std::swap(lu_[k * n_ + j], lu_[p * n_ + j]);
      std::swap(piv_[k], piv_[p]);
    }
    double inv = 1.0 / lu_[k * n_ + k];
    for (int i = k + 1; i < n_; ++i) {
      double f = lu_[i * n_ + k] * inv;
      lu_[i * n_ + k] = f;
      for (int j = k + 1; j < n_; ++j) lu_[i * n_ + j] -= f * lu_[k * n_ + j];
    }
  }
}

std::vector<double> DenseLU::solve(const std::vector<double>& b) const {
  if (singular_) fail("lu_singular", "singular coarse matrix");
  std::vector<double> x(n_);
  for (int i = 0; i < n_; ++i) x[i] = b[piv_[i]];
  for (int i = 1; i < n_; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= lu_[i * n_ + j] * x[j];
    x[i] = s;
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n_; ++j) s -= lu_[i * n_ + j] * x[j];
    x[i] = s / lu_[i * n_ + i];
  }
  return x;
}

}  // namespace kfbi
