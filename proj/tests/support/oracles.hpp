#pragma once

// Reference computations used to check the library from outside.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "gsn/greedy.hpp"
#include "gsn/train.hpp"

namespace gsn::oracle {

/// Least-squares residual norm of f on the columns, by SVD.
inline double ls_residual(const Matrix& cols, const Vector& f) {
  if (cols.cols() == 0) return f.norm();
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  return (f - cols * svd.solve(f)).norm();
}

inline Vector ls_solve(const Matrix& cols, const Vector& f) {
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-12);
  return svd.solve(f);
}

inline Matrix random_unit_atoms(Rng& rng, Eigen::Index n, Eigen::Index k) {
  Matrix d(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) d(i, j) = rng.normal();
    d.col(j).normalize();
  }
  return d;
}

struct GreedyCheck {
  std::size_t steps = 0;
  std::size_t mismatches = 0;
  double worst_gap = 0.0;  // chosen squared residual minus best squared residual
};

/// Runs OGA on a random instance and compares every selection with the
/// exhaustive least-squares choice.
inline GreedyCheck greedy_against_brute_force(Rng& rng, Eigen::Index n, Eigen::Index k, double tol = 1e-10) {
  const Matrix d = random_unit_atoms(rng, n, k);
  Vector f(n);
  for (Eigen::Index i = 0; i < n; ++i) f(i) = rng.normal();
  MatrixAtoms atoms{&d};
  GreedyState state(atoms, f);
  GreedyCheck out;
  std::vector<std::size_t> chosen;
  for (Eigen::Index step = 0; step < n; ++step) {
    const auto r = oga_step(state);
    if (!r) break;
    double best = std::numeric_limits<double>::infinity();
    double got = best;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (std::find(chosen.begin(), chosen.end(), static_cast<std::size_t>(j)) != chosen.end()) continue;
      Matrix cols(n, static_cast<Eigen::Index>(chosen.size()) + 1);
      for (std::size_t c = 0; c < chosen.size(); ++c) {
        cols.col(static_cast<Eigen::Index>(c)) = d.col(static_cast<Eigen::Index>(chosen[c]));
      }
      cols.col(cols.cols() - 1) = d.col(j);
      const double res = ls_residual(cols, f);
      best = std::min(best, res * res);
      if (static_cast<std::size_t>(j) == *r.selected) got = res * res;
    }
    const double gap = got - best;
    out.worst_gap = std::max(out.worst_gap, gap);
    if (gap > tol) ++out.mismatches;
    ++out.steps;
    chosen.push_back(*r.selected);
  }
  return out;
}

/// Components whose magnitude is below this scale are compared absolutely.
inline constexpr double kGradientFloor = 1e-4;

struct GradientCheck {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double max_rel = 0.0;
};

/// Central differences of the batch MSE against loss_and_gradients. Inner
/// weights of nodes with a pre-activation within `kink` of zero are skipped.
inline GradientCheck check_gradients(const NetworkParams& p, const Matrix& x, const Vector& y, double h = 1e-6,
                                     double kink = 1e-4) {
  Vector grad;
  loss_and_gradients(p, x, y, grad);
  const Eigen::Index n = p.nodes();
  const Eigen::Index d = p.dim();
  Matrix z = x * p.a().transpose();
  z.rowwise() += p.b().transpose();
  std::vector<char> near_kink(static_cast<std::size_t>(n), 0);
  for (Eigen::Index k = 0; k < n; ++k) near_kink[static_cast<std::size_t>(k)] = z.col(k).cwiseAbs().minCoeff() < kink;

  GradientCheck out;
  for (Eigen::Index i = 0; i < p.flat().size(); ++i) {
    const Eigen::Index node = i < n * d ? i % n : (i < n * (d + 1) ? i - n * d : -1);
    if (node >= 0 && near_kink[static_cast<std::size_t>(node)]) {
      ++out.skipped;
      continue;
    }
    NetworkParams plus = p;
    NetworkParams minus = p;
    plus.flat()(i) += h;
    minus.flat()(i) -= h;
    const double fd = (mse(plus, x, y) - mse(minus, x, y)) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad(i)), kGradientFloor});
    out.max_rel = std::max(out.max_rel, std::abs(fd - grad(i)) / scale);
    ++out.checked;
  }
  return out;
}

/// Random parameters and batch for gradient checks.
struct GradientCase {
  NetworkParams params;
  Matrix x;
  Vector y;
};

inline GradientCase random_gradient_case(Rng& rng) {
  const auto n = static_cast<Eigen::Index>(1 + rng.below(8));
  const auto d = static_cast<Eigen::Index>(1 + rng.below(5));
  const auto b = static_cast<Eigen::Index>(1 + rng.below(20));
  GradientCase c{NetworkParams(n, d), Matrix(b, d), Vector(b)};
  for (Eigen::Index i = 0; i < c.params.flat().size(); ++i) c.params.flat()(i) = rng.normal();
  for (Eigen::Index i = 0; i < b; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) c.x(i, j) = rng.uniform(-1.0, 1.0);
    c.y(i) = rng.normal();
  }
  return c;
}

}  // namespace gsn::oracle
