#pragma once

#include <vector>

#include "kfbi/common.hpp"

namespace kfbi {

/// Uniform Cartesian grid on [x0,x1] x [y0,y1] with N subdivisions per
/// direction (spacing must match in both).  Periodic directions carry N
/// nodes (0..N-1 with wraparound); non-periodic carry N+1 with the first
/// and last on the boundary.
struct CartesianGrid {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  int n = 0;
  double h = 0;
  bool periodic_x = false, periodic_y = false;

  CartesianGrid() = default;
  CartesianGrid(double x0_, double x1_, double y0_, double y1_, int n_,
                bool per_x = false, bool per_y = false)
      : x0(x0_), x1(x1_), y0(y0_), y1(y1_), n(n_), periodic_x(per_x),
        periodic_y(per_y) {
    if (n <= 0) fail("grid_size", "N must be positive");
    h = (x1 - x0) / n;
    double hy = (y1 - y0) / n;
    if (std::abs(h - hy) > 1e-12 * std::abs(h))
      fail("grid_anisotropic", "grid spacing must match in both directions");
  }

  int nx() const { return periodic_x ? n : n + 1; }
  int ny() const { return periodic_y ? n : n + 1; }
  int node_count() const { return nx() * ny(); }
  int index(int i, int j) const { return j * nx() + i; }
  double x(int i) const { return x0 + i * h; }
  double y(int j) const { return y0 + j * h; }

  int wrap_x(int i) const {
    if (!periodic_x) return i;
    int m = i % n;
    return m < 0 ? m + n : m;
  }
  int wrap_y(int j) const {
    if (!periodic_y) return j;
    int m = j % n;
    return m < 0 ? m + n : m;
  }

  bool interior(int i, int j) const {
    bool ix = periodic_x || (i >= 1 && i <= n - 1);
    bool iy = periodic_y || (j >= 1 && j <= n - 1);
    return ix && iy;
  }
  bool boundary(int i, int j) const { return !interior(i, j); }
};

/// Node-indexed values on a grid.
struct GridFunction {
  const CartesianGrid* grid = nullptr;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const CartesianGrid& g)
      : grid(&g), values(g.node_count(), 0.0) {}

  double& operator()(int i, int j) { return values[grid->index(i, j)]; }
  double operator()(int i, int j) const { return values[grid->index(i, j)]; }
  double& operator[](int idx) { return values[idx]; }
  double operator[](int idx) const { return values[idx]; }
};

}  // namespace kfbi
