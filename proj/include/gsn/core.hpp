#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsn/error.hpp"

namespace gsn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kUnitNormTol = 1e-12;

inline double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Input points, target values, and the box they were drawn from.
class Dataset {
 public:
  Dataset(Matrix inputs, Vector targets, std::vector<Interval> bounds)
      : inputs_(std::move(inputs)), targets_(std::move(targets)), bounds_(std::move(bounds)) {
    if (inputs_.rows() < 1 || inputs_.cols() < 1) {
      throw InvalidArgument("dataset needs at least one point and one input dimension");
    }
    if (inputs_.rows() != targets_.size()) {
      throw InvalidArgument("dataset: " + std::to_string(inputs_.rows()) + " input rows but " +
                            std::to_string(targets_.size()) + " targets");
    }
    if (static_cast<Eigen::Index>(bounds_.size()) != inputs_.cols()) {
      throw InvalidArgument("dataset: domain bounds do not match input dimension");
    }
    for (Eigen::Index j = 0; j < inputs_.cols(); ++j) {
      const Interval& iv = bounds_[static_cast<std::size_t>(j)];
      if (!(iv.lo <= iv.hi)) throw InvalidArgument("dataset: empty domain interval");
      for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        if (!iv.contains(inputs_(i, j))) {
          throw InvalidArgument("dataset: point " + std::to_string(i) + " lies outside the domain");
        }
      }
    }
  }

  const Matrix& inputs() const noexcept { return inputs_; }
  const Vector& targets() const noexcept { return targets_; }
  const std::vector<Interval>& bounds() const noexcept { return bounds_; }

  Eigen::Index size() const noexcept { return inputs_.rows(); }
  Eigen::Index dim() const noexcept { return inputs_.cols(); }

  double domain_volume() const noexcept {
    double v = 1.0;
    for (const auto& iv : bounds_) v *= iv.width();
    return v;
  }

  /// Rows `idx` as a new dataset over the same domain.
  Dataset subset(const std::vector<Eigen::Index>& idx) const {
    Matrix x(static_cast<Eigen::Index>(idx.size()), dim());
    Vector y(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      x.row(static_cast<Eigen::Index>(k)) = inputs_.row(idx[k]);
      y(static_cast<Eigen::Index>(k)) = targets_(idx[k]);
    }
    return Dataset(std::move(x), std::move(y), bounds_);
  }

 private:
  Matrix inputs_;
  Vector targets_;
  std::vector<Interval> bounds_;
};

/// A point (a, b) on the unit sphere S^d, stored as one (d+1)-vector with the
/// bias in the last slot.
class Direction {
 public:
  explicit Direction(Vector point) : point_(std::move(point)) {
    if (point_.size() < 2) throw InvalidArgument("direction needs at least two coordinates");
    if (!point_.allFinite() || std::abs(point_.norm() - 1.0) > kUnitNormTol) {
      throw InvalidArgument("direction is not on the unit sphere");
    }
  }

  Direction(const Vector& a, double b) : Direction(stack(a, b)) {}

  /// Projects any nonzero vector onto the sphere.
  static Direction normalized(const Vector& point) {
    const double n = point.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero vector");
    return Direction(point / n);
  }

  Eigen::Index dim() const noexcept { return point_.size() - 1; }
  auto a() const { return point_.head(point_.size() - 1); }
  double b() const noexcept { return point_(point_.size() - 1); }
  const Vector& point() const noexcept { return point_; }

  template <typename Derived>
  double preactivation(const Eigen::MatrixBase<Derived>& x) const {
    return a().dot(x) + b();
  }

  bool operator==(const Direction& o) const { return point_ == o.point_; }

 private:
  static Vector stack(const Vector& a, double b) {
    Vector p(a.size() + 1);
    p.head(a.size()) = a;
    p(a.size()) = b;
    return p;
  }

  Vector point_;
};

/// Converts a raw node c*relu(a.x + b) into w*relu(abar.x + bbar) with
/// (abar, bbar) on the sphere; positive homogeneity gives w = c*|(a, b)|.
inline std::pair<Direction, double> rescale_node(const Vector& a, double b, double c) {
  Vector p(a.size() + 1);
  p.head(a.size()) = a;
  p(a.size()) = b;
  const double n = p.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("invalid node: zero inner weight vector");
  return {Direction(p / n), c * n};
}

struct Node {
  Direction direction;
  double outer_weight;

  bool operator==(const Node&) const = default;
};

class ShallowNetwork {
 public:
  explicit ShallowNetwork(Eigen::Index input_dim) : input_dim_(input_dim) {
    if (input_dim < 1) throw InvalidArgument("network input dimension must be positive");
  }

  ShallowNetwork(Eigen::Index input_dim, std::vector<Node> nodes) : ShallowNetwork(input_dim) {
    for (auto& n : nodes) add(std::move(n.direction), n.outer_weight);
  }

  void add(Direction dir, double outer_weight) {
    if (dir.dim() != input_dim_) throw InvalidArgument("node dimension does not match network");
    nodes_.push_back(Node{std::move(dir), outer_weight});
  }

  Eigen::Index input_dim() const noexcept { return input_dim_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  bool operator==(const ShallowNetwork&) const = default;

 private:
  Eigen::Index input_dim_;
  std::vector<Node> nodes_;
};

template <typename Derived>
double network_eval(const ShallowNetwork& net, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != net.input_dim()) throw InvalidArgument("network_eval: dimension mismatch");
  double sum = 0.0;
  for (const auto& node : net.nodes()) sum += node.outer_weight * relu(node.direction.preactivation(x));
  return sum;
}

/// Row-wise network_eval; uses the same summation order so results agree bit for bit.
inline Vector batch_eval(const ShallowNetwork& net, const Matrix& inputs) {
  if (inputs.rows() > 0 && inputs.cols() != net.input_dim()) {
    throw InvalidArgument("batch_eval: dimension mismatch");
  }
  Vector out(inputs.rows());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) out(i) = network_eval(net, inputs.row(i).transpose());
  return out;
}

}  // namespace gsn
