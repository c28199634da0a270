#pragma once

#include "chemo/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace chemo {

/// Nodal values of a scalar quantity on a Grid.
template <typename Scalar>
class Field {
 public:
  using Values = ArrayX<Scalar>;

  Field() = default;

  Field(const Grid& grid, Values values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("field has " + std::to_string(values_.size()) + " values, grid has " +
                                  std::to_string(grid_.size()) + " nodes");
    }
    if (!values_.isFinite().all()) throw std::invalid_argument("field values must be finite");
  }

  static Field constant(const Grid& grid, Scalar c) { return Field(grid, Values::Constant(grid.size(), c)); }

  /// Samples fn(x) (1D) or fn(x, y) (2D) at every node.
  template <typename Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    Values v(grid.size());
    for (Index j = 0; j < grid.cells(1); ++j) {
      for (Index i = 0; i < grid.cells(0); ++i) {
        const double x = grid.coordinate(0, i);
        if (grid.dim() == 1) {
          v[grid.index(i, j)] = static_cast<Scalar>(fn(x, 0.0));
        } else {
          v[grid.index(i, j)] = static_cast<Scalar>(fn(x, grid.coordinate(1, j)));
        }
      }
    }
    return Field(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Index size() const { return values_.size(); }
  Scalar operator[](Index k) const { return values_[k]; }

  template <typename Other>
  Field<Other> cast() const {
    return Field<Other>(grid_, values_.template cast<Other>());
  }

 private:
  Grid grid_;
  Values values_;
};

using ScalarField = Field<double>;

// Array-level kernels. Each takes the grid explicitly so callers can pass
// Eigen expressions without materialising a Field.

template <typename Derived>
typename Derived::Scalar integrate(const Grid& grid, const Eigen::ArrayBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  return (grid.weights<Scalar>() * f.derived()).sum();
}

template <typename Derived>
typename Derived::Scalar lp_norm(const Grid& grid, const Eigen::ArrayBase<Derived>& f, double p) {
  using Scalar = typename Derived::Scalar;
  using std::pow;
  if (!(p >= 1.0)) throw std::invalid_argument("Lp norm needs p >= 1");
  const Scalar sp = static_cast<Scalar>(p);
  if (p == 1.0) return integrate(grid, f.abs());
  if (p == 2.0) return std::sqrt(integrate(grid, f.square()));
  return pow(integrate(grid, f.abs().pow(sp)), Scalar(1) / sp);
}

template <typename Derived>
typename Derived::Scalar linf_norm(const Eigen::ArrayBase<Derived>& f) {
  return f.abs().maxCoeff();
}

template <typename Derived>
typename Derived::Scalar mean(const Grid& grid, const Eigen::ArrayBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  return integrate(grid, f) / static_cast<Scalar>(grid.measure());
}

/// Second-order Laplacian with mirrored ghost nodes (homogeneous Neumann).
template <typename Derived>
ArrayX<typename Derived::Scalar> discrete_laplacian(const Grid& grid, const Eigen::ArrayBase<Derived>& f_in) {
  using Scalar = typename Derived::Scalar;
  const ArrayX<Scalar>& f = f_in.derived();
  ArrayX<Scalar> out = ArrayX<Scalar>::Zero(f.size());
  const Index nx = grid.cells(0);
  const Index ny = grid.cells(1);

  const Scalar hx = static_cast<Scalar>(grid.spacing(0));
  const Scalar inv_x = Scalar(1) / (hx * hx);
  for (Index j = 0; j < ny; ++j) {
    const Index o = j * nx;
    for (Index i = 0; i < nx; ++i) {
      const Scalar left = f[o + (i > 0 ? i - 1 : 1)];
      const Scalar right = f[o + (i < nx - 1 ? i + 1 : nx - 2)];
      out[o + i] = (left - 2 * f[o + i] + right) * inv_x;
    }
  }
  if (grid.dim() == 2) {
    const Scalar hy = static_cast<Scalar>(grid.spacing(1));
    const Scalar inv_y = Scalar(1) / (hy * hy);
    for (Index j = 0; j < ny; ++j) {
      const Index down = (j > 0 ? j - 1 : 1) * nx;
      const Index up = (j < ny - 1 ? j + 1 : ny - 2) * nx;
      const Index o = j * nx;
      for (Index i = 0; i < nx; ++i) {
        out[o + i] += (f[down + i] - 2 * f[o + i] + f[up + i]) * inv_y;
      }
    }
  }
  return out;
}

/// Sum over cell faces of the squared difference quotient times face measure.
/// Equals -integrate(f * discrete_laplacian(f)).
template <typename Derived>
typename Derived::Scalar gradient_sq_integral(const Grid& grid, const Eigen::ArrayBase<Derived>& f_in) {
  using Scalar = typename Derived::Scalar;
  const ArrayX<Scalar>& f = f_in.derived();
  const Index nx = grid.cells(0);
  const Index ny = grid.cells(1);
  const Scalar hx = static_cast<Scalar>(grid.spacing(0));
  Scalar total = 0;

  const ArrayX<Scalar> wy = grid.dim() == 2 ? grid.axis_weights<Scalar>(1) : ArrayX<Scalar>::Ones(1);
  for (Index j = 0; j < ny; ++j) {
    Scalar line = 0;
    for (Index i = 0; i + 1 < nx; ++i) {
      const Scalar d = f[j * nx + i + 1] - f[j * nx + i];
      line += d * d;
    }
    total += wy[j] * line / hx;
  }
  if (grid.dim() == 2) {
    const Scalar hy = static_cast<Scalar>(grid.spacing(1));
    const ArrayX<Scalar> wx = grid.axis_weights<Scalar>(0);
    for (Index i = 0; i < nx; ++i) {
      Scalar line = 0;
      for (Index j = 0; j + 1 < ny; ++j) {
        const Scalar d = f[(j + 1) * nx + i] - f[j * nx + i];
        line += d * d;
      }
      total += wx[i] * line / hy;
    }
  }
  return total;
}

// Field overloads.

template <typename Scalar>
Scalar integrate(const Field<Scalar>& f) {
  return integrate(f.grid(), f.values());
}

template <typename Scalar>
Scalar lp_norm(const Field<Scalar>& f, double p) {
  return lp_norm(f.grid(), f.values(), p);
}

template <typename Scalar>
Scalar linf_norm(const Field<Scalar>& f) {
  return linf_norm(f.values());
}

template <typename Scalar>
Scalar mean(const Field<Scalar>& f) {
  return mean(f.grid(), f.values());
}

template <typename Scalar>
Field<Scalar> discrete_laplacian(const Field<Scalar>& f) {
  return Field<Scalar>(f.grid(), discrete_laplacian(f.grid(), f.values()));
}

template <typename Scalar>
Scalar gradient_sq_integral(const Field<Scalar>& f) {
  return gradient_sq_integral(f.grid(), f.values());
}

}  // namespace chemo
