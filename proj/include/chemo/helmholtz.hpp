#pragma once

#include "chemo/field.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace chemo {

/// Eigenvalue of -Delta_h for cosine mode k on an axis with n nodes and spacing h.
template <typename Scalar>
Scalar neumann_stencil_eigenvalue(Index k, Index n, double h) {
  using std::sin;
  const Scalar s = sin(std::numbers::pi_v<Scalar> * static_cast<Scalar>(k) / (2 * static_cast<Scalar>(n - 1)));
  const Scalar hh = static_cast<Scalar>(h);
  return 4 * s * s / (hh * hh);
}

/// Exact inverse of (I - Delta_h) for the mirrored Neumann stencil.
///
/// The cosine vectors cos(pi k i / (N-1)) diagonalise the stencil on every
/// axis, so the solve is: forward DCT-I, divide mode k by 1 + lambda_k,
/// inverse DCT-I. The transforms are dense matrix products; the object only
/// holds read-only tables, so one instance may serve several threads.
template <typename Scalar>
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Grid& grid) : grid_(grid) {
    for (int a = 0; a < grid.dim(); ++a) axes_[a] = Axis(grid, a);
    const Index nx = grid.cells(0);
    const Index ny = grid.cells(1);
    denom_.resize(nx, ny);
    for (Index j = 0; j < ny; ++j) {
      for (Index i = 0; i < nx; ++i) {
        Scalar lam = axes_[0].eigenvalues[i];
        if (grid.dim() == 2) lam += axes_[1].eigenvalues[j];
        denom_(i, j) = Scalar(1) + lam;
      }
    }
  }

  const Grid& grid() const { return grid_; }

  /// Coefficients c such that f = sum_k c_k cos-mode_k.
  MatrixX<Scalar> forward(const ArrayX<Scalar>& f) const {
    const Index nx = grid_.cells(0);
    const Index ny = grid_.cells(1);
    Eigen::Map<const MatrixX<Scalar>> F(f.data(), nx, ny);
    if (grid_.dim() == 1) return axes_[0].analysis * F;
    return axes_[0].analysis * F * axes_[1].analysis.transpose();
  }

  ArrayX<Scalar> inverse(const MatrixX<Scalar>& c) const {
    ArrayX<Scalar> out(grid_.size());
    Eigen::Map<MatrixX<Scalar>> O(out.data(), grid_.cells(0), grid_.cells(1));
    if (grid_.dim() == 1) {
      O.noalias() = axes_[0].synthesis * c;
    } else {
      O.noalias() = axes_[0].synthesis * c * axes_[1].synthesis.transpose();
    }
    return out;
  }

  /// v with (I - Delta_h) v = u.
  ArrayX<Scalar> solve(const ArrayX<Scalar>& u) const {
    MatrixX<Scalar> c = forward(u);
    c.array() /= denom_.array();
    return inverse(c);
  }

  Field<Scalar> solve(const Field<Scalar>& u) const { return Field<Scalar>(grid_, solve(u.values())); }

  /// (I - Delta_h) v computed directly from the stencil.
  ArrayX<Scalar> apply(const ArrayX<Scalar>& v) const { return v - discrete_laplacian(grid_, v); }

  /// Smallest nonzero eigenvalue of -Delta_h.
  Scalar first_eigenvalue() const {
    Scalar lam = axes_[0].eigenvalues[1];
    if (grid_.dim() == 2) lam = std::min(lam, axes_[1].eigenvalues[1]);
    return lam;
  }

 private:
  struct Axis {
    Axis() = default;
    Axis(const Grid& grid, int axis) {
      const Index n = grid.cells(axis);
      const Index period = 2 * (n - 1);
      const ArrayX<Scalar> w = grid.axis_weights<Scalar>(axis);
      synthesis.resize(n, n);
      analysis.resize(n, n);
      eigenvalues.resize(n);
      for (Index k = 0; k < n; ++k) {
        // sum_i w_i cos^2 = L/2 for interior modes, L for k = 0 and k = n-1.
        const Scalar norm = static_cast<Scalar>(grid.length(axis)) / ((k == 0 || k == n - 1) ? 1 : 2);
        for (Index i = 0; i < n; ++i) {
          const Index m = (i * k) % period;  // exact argument reduction
          using std::cos;
          const Scalar c = cos(std::numbers::pi_v<Scalar> * static_cast<Scalar>(m) / static_cast<Scalar>(n - 1));
          synthesis(i, k) = c;
          analysis(k, i) = w[i] * c / norm;
        }
        eigenvalues[k] = neumann_stencil_eigenvalue<Scalar>(k, n, grid.spacing(axis));
      }
    }
    MatrixX<Scalar> synthesis;
    MatrixX<Scalar> analysis;
    ArrayX<Scalar> eigenvalues;
  };

  Grid grid_;
  std::array<Axis, 2> axes_;
  MatrixX<Scalar> denom_;
};

template <typename Scalar>
Field<Scalar> solve_helmholtz(const Field<Scalar>& u) {
  return HelmholtzSolver<Scalar>(u.grid()).solve(u);
}

template <typename Scalar>
Field<Scalar> apply_helmholtz(const Field<Scalar>& v) {
  return Field<Scalar>(v.grid(), v.values() - discrete_laplacian(v.grid(), v.values()));
}

}  // namespace chemo
