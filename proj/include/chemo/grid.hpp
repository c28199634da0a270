#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace chemo {

using Index = Eigen::Index;

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ArrayXd = ArrayX<double>;
using MatrixXd = MatrixX<double>;

/// Uniform node-centred grid on an axis-aligned interval or rectangle.
///
/// Nodes sit at x_i = i * h for i = 0..N-1 along each axis, so both end
/// points are nodes. Node (i, j) is stored at i + N_x * j (x fastest).
class Grid {
 public:
  static constexpr Index kMinCells = 8;

  Grid() = default;

  static Grid line(double length, Index cells) { return Grid(1, {length, 0.0}, {cells, 1}); }

  static Grid rect(double lx, double ly, Index nx, Index ny) { return Grid(2, {lx, ly}, {nx, ny}); }

  Grid(int dim, std::array<double, 2> lengths, std::array<Index, 2> cells)
      : dim_(dim), lengths_(lengths), cells_(cells) {
    if (dim != 1 && dim != 2) {
      throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(dim));
    }
    if (dim == 1) {
      lengths_[1] = 0.0;
      cells_[1] = 1;
    }
    for (int a = 0; a < dim; ++a) {
      if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
        throw std::invalid_argument("grid length must be positive on axis " + std::to_string(a));
      }
      if (cells_[a] < kMinCells) {
        throw std::invalid_argument("grid needs at least " + std::to_string(kMinCells) +
                                    " nodes per axis, got " + std::to_string(cells_[a]));
      }
      spacing_[a] = lengths_[a] / static_cast<double>(cells_[a] - 1);
    }
  }

  int dim() const { return dim_; }
  double length(int axis) const { return lengths_[axis]; }
  Index cells(int axis) const { return cells_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double min_spacing() const { return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]); }

  Index size() const { return cells_[0] * cells_[1]; }

  /// |Omega|
  double measure() const { return dim_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1]; }

  Index index(Index i, Index j = 0) const { return i + cells_[0] * j; }

  double coordinate(int axis, Index i) const { return spacing_[axis] * static_cast<double>(i); }

  /// Trapezoidal quadrature weights, one per node; they sum to measure().
  template <typename Scalar = double>
  ArrayX<Scalar> weights() const {
    ArrayX<Scalar> w(size());
    const auto wx = axis_weights<Scalar>(0);
    if (dim_ == 1) return wx;
    const auto wy = axis_weights<Scalar>(1);
    for (Index j = 0; j < cells_[1]; ++j) w.segment(j * cells_[0], cells_[0]) = wx * wy[j];
    return w;
  }

  template <typename Scalar = double>
  ArrayX<Scalar> axis_weights(int axis) const {
    const Scalar h = static_cast<Scalar>(spacing_[axis]);
    ArrayX<Scalar> w = ArrayX<Scalar>::Constant(cells_[axis], h);
    w[0] = h / 2;
    w[cells_[axis] - 1] = h / 2;
    return w;
  }

  friend bool operator==(const Grid& lhs, const Grid& rhs) {
    return lhs.dim_ == rhs.dim_ && lhs.lengths_ == rhs.lengths_ && lhs.cells_ == rhs.cells_;
  }

 private:
  int dim_ = 1;
  std::array<double, 2> lengths_{1.0, 0.0};
  std::array<Index, 2> cells_{kMinCells, 1};
  std::array<double, 2> spacing_{1.0 / (kMinCells - 1), 0.0};
};

}  // namespace chemo
