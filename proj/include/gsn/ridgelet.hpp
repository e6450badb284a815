#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gsn/core.hpp"
#include "gsn/parallel.hpp"
#include "gsn/sampling.hpp"

namespace gsn {

/// Dual kernel paired with the ReLU: minus the fourth derivative of the
/// Gaussian exp(-z^2/2), scaled by 1 / (2 (2 pi)^(d - 1/2)).
inline double tau(double z, Eigen::Index d) {
  const double z2 = z * z;
  const double scale = 2.0 * std::pow(2.0 * std::numbers::pi, static_cast<double>(d) - 0.5);
  return -(z2 * z2 - 6.0 * z2 + 3.0) / scale * std::exp(-0.5 * z2);
}

/// Beyond this |z| the Gaussian factor of tau underflows to exactly zero.
inline constexpr double kTauSupport = 40.0;

/// Trapezoidal rule on r_j = j * r_max / n_nodes, j = 1..n_nodes. The
/// integrand carries a factor r^(d+1), so the r = 0 endpoint contributes nothing.
struct RadialQuadrature {
  double r_max = 20.0;
  std::size_t n_nodes = 200;

  void validate() const {
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw InvalidArgument("radial quadrature: r_max must be positive");
    if (n_nodes < 2) throw InvalidArgument("radial quadrature: need at least two nodes");
  }

  double step() const { return r_max / static_cast<double>(n_nodes); }
  double node(std::size_t j) const { return step() * static_cast<double>(j + 1); }
  double weight(std::size_t j) const { return j + 1 == n_nodes ? 0.5 * step() : step(); }
};

/// Monte Carlo estimate of the ridgelet transform with the training points as
/// nodes: vol(domain)/N * sum_i f(x_i) tau(a . x_i + b).
inline double ridgelet_transform(const Dataset& data, const Vector& a, double b) {
  if (a.size() != data.dim()) throw InvalidArgument("ridgelet_transform: dimension mismatch");
  const Vector z = (data.inputs() * a).array() + b;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) sum += data.targets()(i) * tau(z(i), data.dim());
  return data.domain_volume() / static_cast<double>(data.size()) * sum;
}

/// Samples of the ridgelet transform on a (a, b) grid, rows indexed by `a`
/// and columns by `b`.
struct RidgeletField {
  std::vector<Vector> a_points;
  std::vector<double> b_points;
  Matrix values;
};

inline RidgeletField ridgelet_on_grid(const Dataset& data, std::vector<Vector> a_points, std::vector<double> b_points) {
  RidgeletField field{std::move(a_points), std::move(b_points), {}};
  field.values.resize(static_cast<Eigen::Index>(field.a_points.size()),
                      static_cast<Eigen::Index>(field.b_points.size()));
  for (std::size_t i = 0; i < field.a_points.size(); ++i) {
    for (std::size_t j = 0; j < field.b_points.size(); ++j) {
      field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ridgelet_transform(data, field.a_points[i], field.b_points[j]);
    }
  }
  if (!field.values.allFinite()) throw NumericalError("ridgelet field has non-finite values");
  return field;
}

/// Radial integral of the ridgelet transform along the ray through `dir`,
/// weighted by r^(d+1).
inline double collapsed_ridgelet(const Dataset& data, const Direction& dir, const RadialQuadrature& quad) {
  quad.validate();
  const Eigen::Index d = data.dim();
  if (dir.dim() != d) throw InvalidArgument("collapsed_ridgelet: dimension mismatch");
  const Vector z = (data.inputs() * dir.a()).array() + dir.b();
  std::vector<double> acc(quad.n_nodes, 0.0);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double fi = data.targets()(i);
    const double zi = z(i);
    for (std::size_t k = 0; k < quad.n_nodes; ++k) {
      const double u = quad.node(k) * zi;
      if (std::abs(u) > kTauSupport) break;
      acc[k] += fi * tau(u, d);
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < quad.n_nodes; ++k) {
    const double r = quad.node(k);
    sum += quad.weight(k) * std::pow(r, static_cast<double>(d + 1)) * acc[k];
  }
  return data.domain_volume() / static_cast<double>(data.size()) * sum;
}

struct CollapsedField {
  std::vector<Direction> directions;
  Vector values;
  RadialQuadrature quadrature;

  std::size_t size() const noexcept { return directions.size(); }
};

inline CollapsedField collapsed_field(const Dataset& data, std::vector<Direction> directions,
                                      const RadialQuadrature& quad = {}, std::size_t threads = 1) {
  quad.validate();
  CollapsedField field{std::move(directions), {}, quad};
  field.values.resize(static_cast<Eigen::Index>(field.directions.size()));
  parallel_for(field.directions.size(), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t j = lo; j < hi; ++j) {
      field.values(static_cast<Eigen::Index>(j)) = collapsed_ridgelet(data, field.directions[j], quad);
    }
  });
  if (!field.values.allFinite()) throw NumericalError("collapsed ridgelet field has non-finite values");
  return field;
}

inline constexpr double kDefaultPruneThreshold = 1e-3;

struct PruneResult {
  Dictionary dictionary;
  /// Every field value was zero; the dictionary was returned unchanged.
  bool degenerate = false;
  /// Field entries examined and how many fell at or below the cut.
  std::size_t considered = 0;
  std::size_t rejected = 0;
};

/// Keeps atom k iff |CR(k)| > rel_threshold * max_j |CR(j)|. The field may
/// cover either the dictionary atoms or the full sampled direction set; the
/// maximum and the rejection count run over whatever the field covers.
inline PruneResult prune_dictionary(const Dictionary& dict, const CollapsedField& field,
                                    double rel_threshold = kDefaultPruneThreshold) {
  if (!(rel_threshold >= 0.0 && rel_threshold < 1.0)) {
    throw InvalidArgument("prune_dictionary: threshold must lie in [0, 1)");
  }
  Vector per_atom(static_cast<Eigen::Index>(dict.size()));
  if (field.size() == dict.size()) {
    for (std::size_t k = 0; k < dict.size(); ++k) {
      if (!(field.directions[k] == dict.direction(k))) {
        throw InvalidArgument("prune_dictionary: field direction " + std::to_string(k) + " does not match atom");
      }
      per_atom(static_cast<Eigen::Index>(k)) = field.values(static_cast<Eigen::Index>(k));
    }
  } else if (field.size() == dict.source_directions().size()) {
    for (std::size_t k = 0; k < dict.size(); ++k) {
      per_atom(static_cast<Eigen::Index>(k)) = field.values(static_cast<Eigen::Index>(dict.source_indices()[k]));
    }
  } else {
    throw InvalidArgument("prune_dictionary: field does not correspond to the dictionary");
  }

  const double peak = field.size() > 0 ? field.values.cwiseAbs().maxCoeff() : 0.0;
  if (!(peak > 0.0)) return {dict, true, field.size(), 0};
  const double cut = rel_threshold * peak;
  std::vector<std::size_t> keep;
  for (Eigen::Index k = 0; k < per_atom.size(); ++k) {
    if (std::abs(per_atom(k)) > cut) keep.push_back(static_cast<std::size_t>(k));
  }
  const auto rejected = static_cast<std::size_t>((field.values.array().abs() <= cut).count());
  return {dict.select(keep), false, field.size(), rejected};
}

/// Surface measure of the unit sphere S^d in R^(d+1).
inline double sphere_area(Eigen::Index d) {
  const double h = 0.5 * static_cast<double>(d + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

/// Quadrature of the reconstruction integral over the field's direction
/// cloud. Only a qualitative estimate of f.
template <typename Derived>
double reconstruct_from_crf(const Eigen::MatrixBase<Derived>& x, const CollapsedField& field) {
  if (field.size() == 0) throw InvalidArgument("reconstruct_from_crf: empty field");
  const Eigen::Index d = field.directions.front().dim();
  if (x.size() != d) throw InvalidArgument("reconstruct_from_crf: dimension mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < field.size(); ++j) {
    sum += field.values(static_cast<Eigen::Index>(j)) * relu(field.directions[j].preactivation(x));
  }
  return sphere_area(d) / static_cast<double>(field.size()) * sum;
}

}  // namespace gsn
