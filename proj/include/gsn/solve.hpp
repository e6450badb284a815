#pragma once

#include <vector>

#include <Eigen/QR>

#include "gsn/core.hpp"

namespace gsn {

/// Node activations relu(abar_n . x_i + bbar_n), one column per node.
struct DesignMatrix {
  Matrix values;
  std::vector<Direction> nodes;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

inline DesignMatrix assemble_design(const Dataset& data, std::vector<Direction> nodes) {
  DesignMatrix dm{Matrix(data.size(), static_cast<Eigen::Index>(nodes.size())), std::move(nodes)};
  for (std::size_t n = 0; n < dm.nodes.size(); ++n) {
    const Direction& dir = dm.nodes[n];
    if (dir.dim() != data.dim()) throw InvalidArgument("assemble_design: node dimension does not match dataset");
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      dm.values(i, static_cast<Eigen::Index>(n)) = relu(dir.preactivation(data.inputs().row(i).transpose()));
    }
  }
  return dm;
}

/// Relative rank cutoff of the least-squares solver, against the largest pivot.
inline constexpr double kRankTol = 1e-10;

/// Minimum-norm minimizer of |targets - design * c|_2.
inline Vector fit_outer_weights(const Matrix& design, const Vector& targets) {
  if (design.rows() != targets.size()) throw InvalidArgument("fit_outer_weights: row count does not match targets");
  if (!design.allFinite() || !targets.allFinite()) throw NumericalError("fit_outer_weights: non-finite input");
  if (design.cols() == 0) return Vector();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(kRankTol);
  cod.compute(design);
  Vector c = cod.solve(targets);
  if (!c.allFinite()) throw NumericalError("fit_outer_weights: solver produced non-finite weights");
  return c;
}

inline Vector fit_outer_weights(const DesignMatrix& design, const Vector& targets) {
  return fit_outer_weights(design.values, targets);
}

/// Network with the given nodes and least-squares outer weights on `data`.
inline ShallowNetwork fit_network(const Dataset& data, const std::vector<Direction>& nodes) {
  const DesignMatrix dm = assemble_design(data, nodes);
  const Vector c = fit_outer_weights(dm, data.targets());
  ShallowNetwork net(data.dim());
  for (std::size_t n = 0; n < nodes.size(); ++n) net.add(nodes[n], c(static_cast<Eigen::Index>(n)));
  return net;
}

}  // namespace gsn
