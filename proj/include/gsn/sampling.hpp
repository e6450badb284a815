#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gsn/core.hpp"
#include "gsn/parallel.hpp"
#include "gsn/rng.hpp"
#include "gsn/targets.hpp"

namespace gsn {

enum class SphereScheme { circle_uniform, circle_grid, golden_spiral, gaussian_normalized };

inline std::string to_string(SphereScheme s) {
  switch (s) {
    case SphereScheme::circle_uniform: return "circle-uniform";
    case SphereScheme::circle_grid: return "circle-grid";
    case SphereScheme::golden_spiral: return "golden-spiral";
    case SphereScheme::gaussian_normalized: return "gaussian-normalized";
  }
  return "?";
}

inline SphereScheme parse_scheme(const std::string& s) {
  if (s == "circle-uniform") return SphereScheme::circle_uniform;
  if (s == "circle-grid") return SphereScheme::circle_grid;
  if (s == "golden-spiral") return SphereScheme::golden_spiral;
  if (s == "gaussian-normalized") return SphereScheme::gaussian_normalized;
  throw InvalidArgument("unknown sphere scheme '" + s + "'");
}

/// The scheme used when none is configured: uniform angles on the circle,
/// the golden spiral on S^2, normalized Gaussians above that.
inline SphereScheme default_scheme(Eigen::Index d) {
  if (d == 1) return SphereScheme::circle_uniform;
  if (d == 2) return SphereScheme::golden_spiral;
  return SphereScheme::gaussian_normalized;
}

struct SamplerConfig {
  Eigen::Index dim = 1;
  std::size_t count = 10000;
  std::uint64_t seed = 0;
  SphereScheme scheme = SphereScheme::circle_uniform;

  static SamplerConfig defaults_for(Eigen::Index d, std::uint64_t seed) {
    return {d, static_cast<std::size_t>(10000 * d), seed, default_scheme(d)};
  }

  void validate() const {
    if (dim < 1) throw InvalidArgument("sampler: dimension must be positive");
    if (count < 1) throw InvalidArgument("sampler: direction count must be positive");
    const bool circle = scheme == SphereScheme::circle_uniform || scheme == SphereScheme::circle_grid;
    if (circle && dim != 1) throw InvalidArgument("sampler: circle schemes require d = 1");
    if (scheme == SphereScheme::golden_spiral && dim != 2) {
      throw InvalidArgument("sampler: golden spiral requires d = 2");
    }
  }
};

/// Directions (cos phi, sin phi) on S^1, phi in [-pi, pi).
inline std::vector<Direction> sample_circle(std::size_t count, std::uint64_t seed, bool grid) {
  using std::numbers::pi;
  if (count < 1) throw InvalidArgument("sample_circle: count must be positive");
  std::vector<Direction> out;
  out.reserve(count);
  Rng rng(seed);
  for (std::size_t j = 0; j < count; ++j) {
    const double phi = grid ? -pi + 2.0 * pi * static_cast<double>(j) / static_cast<double>(count)
                            : -pi + 2.0 * pi * rng.uniform();
    out.emplace_back(Vector{{std::cos(phi), std::sin(phi)}});
  }
  return out;
}

/// Deterministic near-uniform points on S^2; coordinates map to (a1, a2, b).
inline std::vector<Direction> golden_spiral(std::size_t count) {
  using std::numbers::phi;
  using std::numbers::pi;
  if (count < 1) throw InvalidArgument("golden_spiral: count must be positive");
  std::vector<Direction> out;
  out.reserve(count);
  const double m = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double fi = static_cast<double>(i);
    const double z = 1.0 - 2.0 * (fi + 0.5) / m;
    const double rho = std::sqrt(1.0 - z * z);
    const double theta = 2.0 * pi * fi / (phi * phi);
    out.emplace_back(Vector{{rho * std::cos(theta), rho * std::sin(theta), z}});
  }
  return out;
}

inline std::vector<Direction> sample_gaussian_sphere(Eigen::Index d, std::size_t count, std::uint64_t seed) {
  if (d < 1 || count < 1) throw InvalidArgument("sample_gaussian_sphere: d and count must be positive");
  std::vector<Direction> out;
  out.reserve(count);
  Rng rng(seed);
  Vector v(d + 1);
  while (out.size() < count) {
    for (Eigen::Index k = 0; k <= d; ++k) v(k) = rng.normal();
    const double n = v.norm();
    if (!(n > 0.0)) continue;
    out.emplace_back(v / n);
  }
  return out;
}

inline std::vector<Direction> sample_directions(const SamplerConfig& cfg) {
  cfg.validate();
  switch (cfg.scheme) {
    case SphereScheme::circle_uniform: return sample_circle(cfg.count, cfg.seed, false);
    case SphereScheme::circle_grid: return sample_circle(cfg.count, cfg.seed, true);
    case SphereScheme::golden_spiral: return golden_spiral(cfg.count);
    case SphereScheme::gaussian_normalized: return sample_gaussian_sphere(cfg.dim, cfg.count, cfg.seed);
  }
  throw InvalidArgument("sampler: unhandled scheme");
}

enum class Layout { random_uniform, grid };

inline std::string to_string(Layout l) { return l == Layout::grid ? "grid" : "random-uniform"; }

inline Layout parse_layout(const std::string& s) {
  if (s == "grid") return Layout::grid;
  if (s == "random-uniform") return Layout::random_uniform;
  throw InvalidArgument("unknown dataset layout '" + s + "'");
}

/// Points on the target's domain with exact target values. Grid layout places
/// k points per axis (k^d = n_points) including the interval endpoints, with
/// the last coordinate varying fastest.
inline Dataset generate_dataset(const TargetFunction& target, std::size_t n_points, std::uint64_t seed,
                                Layout layout) {
  if (n_points < 1) throw InvalidArgument("generate_dataset: n_points must be positive");
  const Eigen::Index d = target.dim;
  const auto n = static_cast<Eigen::Index>(n_points);
  Matrix x(n, d);
  if (layout == Layout::grid) {
    const auto k = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n_points), 1.0 / d)));
    std::size_t kd = 1;
    for (Eigen::Index j = 0; j < d; ++j) kd *= k;
    if (kd != n_points) {
      throw InvalidArgument("generate_dataset: grid layout needs a perfect " + std::to_string(d) +
                            "-th power, got " + std::to_string(n_points));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      auto rem = static_cast<std::size_t>(i);
      for (Eigen::Index j = d - 1; j >= 0; --j) {
        const std::size_t idx = rem % k;
        rem /= k;
        const Interval& iv = target.bounds[static_cast<std::size_t>(j)];
        x(i, j) = k == 1 ? 0.5 * (iv.lo + iv.hi)
                         : iv.lo + iv.width() * static_cast<double>(idx) / static_cast<double>(k - 1);
      }
    }
  } else {
    Rng rng(seed);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const Interval& iv = target.bounds[static_cast<std::size_t>(j)];
        x(i, j) = rng.uniform(iv.lo, iv.hi);
      }
    }
  }
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = target(x.row(i).transpose());
  if (!y.allFinite()) throw NumericalError("generate_dataset: target produced non-finite values");
  return Dataset(std::move(x), std::move(y), target.bounds);
}

/// One dictionary element: a normalized activation vector plus the direction it came from.
struct Atom {
  Direction direction;
  Vector features;
  double raw_norm;
};

/// Dense feature storage is used while N_tr * atoms * 8 stays below this.
inline constexpr std::size_t kDenseFeatureBudget = std::size_t{1} << 30;

/// Normalized activation vectors relu(abar . x_i + bbar) / raw_norm over the
/// training inputs. Atoms keep the index of their direction in
/// `source_directions()` so pruned dictionaries trace back to the sampled set.
///
/// Features live in a dense matrix when it fits the memory budget; otherwise
/// they are recomputed block by block whenever needed.
class Dictionary {
 public:
  Dictionary(std::shared_ptr<const std::vector<Direction>> source, std::vector<std::size_t> source_index,
             std::shared_ptr<const Matrix> xaug, Vector raw_norms, bool dense)
      : source_(std::move(source)),
        source_index_(std::move(source_index)),
        xaug_(std::move(xaug)),
        raw_norms_(std::move(raw_norms)) {
    if (static_cast<Eigen::Index>(source_index_.size()) != raw_norms_.size()) {
      throw InvalidArgument("dictionary: inconsistent atom bookkeeping");
    }
    points_.resize(xaug_->cols(), static_cast<Eigen::Index>(source_index_.size()));
    for (std::size_t k = 0; k < source_index_.size(); ++k) {
      if (source_index_[k] >= source_->size()) throw InvalidArgument("dictionary: source index out of range");
      if (k > 0 && source_index_[k] <= source_index_[k - 1]) {
        throw InvalidArgument("dictionary: source indices must be strictly increasing");
      }
      const Direction& dir = (*source_)[source_index_[k]];
      if (dir.point().size() != xaug_->cols()) throw InvalidArgument("dictionary: direction dimension mismatch");
      points_.col(static_cast<Eigen::Index>(k)) = dir.point();
    }
    if (dense) {
      auto features = std::make_shared<Matrix>(xaug_->rows(), points_.cols());
      for (Eigen::Index c0 = 0; c0 < points_.cols(); c0 += kBlock) {
        const Eigen::Index w = std::min<Eigen::Index>(kBlock, points_.cols() - c0);
        features->middleCols(c0, w) = block(c0, w);
      }
      dense_ = std::move(features);
    }
  }

  std::size_t size() const noexcept { return source_index_.size(); }
  bool empty() const noexcept { return source_index_.empty(); }
  Eigen::Index rows() const noexcept { return xaug_->rows(); }
  Eigen::Index cols() const noexcept { return static_cast<Eigen::Index>(size()); }
  Eigen::Index points() const noexcept { return rows(); }
  bool is_dense() const noexcept { return dense_ != nullptr; }

  /// Dense feature matrix; only available when the dictionary is dense.
  const Matrix& features() const {
    if (!dense_) throw InvalidArgument("dictionary features are not materialized");
    return *dense_;
  }

  Vector column(Eigen::Index k) const {
    if (dense_) return dense_->col(k);
    return block(k, 1).col(0);
  }

  /// D^T v.
  Vector correlate(const Vector& v) const {
    if (v.size() != rows()) throw InvalidArgument("dictionary: vector length mismatch");
    if (dense_) return dense_->transpose() * v;
    Vector out(cols());
    for (Eigen::Index c0 = 0; c0 < cols(); c0 += kBlock) {
      const Eigen::Index w = std::min<Eigen::Index>(kBlock, cols() - c0);
      out.segment(c0, w).noalias() = block(c0, w).transpose() * v;
    }
    return out;
  }

  const Vector& raw_norms() const noexcept { return raw_norms_; }
  const std::vector<Direction>& source_directions() const noexcept { return *source_; }
  const std::vector<std::size_t>& source_indices() const noexcept { return source_index_; }

  const Direction& direction(std::size_t k) const { return (*source_)[source_index_.at(k)]; }

  Atom atom(std::size_t k) const {
    return Atom{direction(k), column(static_cast<Eigen::Index>(k)), raw_norms_(static_cast<Eigen::Index>(k))};
  }

  /// Source indices that are not atoms of this dictionary.
  std::vector<std::size_t> discarded() const {
    std::vector<std::size_t> out;
    std::size_t k = 0;
    for (std::size_t s = 0; s < source_->size(); ++s) {
      if (k < source_index_.size() && source_index_[k] == s) {
        ++k;
      } else {
        out.push_back(s);
      }
    }
    return out;
  }

  /// Keeps the atoms at positions `keep` (strictly ascending).
  Dictionary select(const std::vector<std::size_t>& keep) const {
    Vector r(static_cast<Eigen::Index>(keep.size()));
    std::vector<std::size_t> idx;
    idx.reserve(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      r(static_cast<Eigen::Index>(k)) = raw_norms_(static_cast<Eigen::Index>(keep[k]));
      idx.push_back(source_index_.at(keep[k]));
    }
    return Dictionary(source_, std::move(idx), xaug_, std::move(r), fits_dense(rows(), keep.size()));
  }

  static bool fits_dense(Eigen::Index rows, std::size_t atoms) {
    return static_cast<std::size_t>(rows) * atoms * sizeof(double) <= kDenseFeatureBudget;
  }

 private:
  static constexpr Eigen::Index kBlock = 512;

  Matrix block(Eigen::Index c0, Eigen::Index w) const {
    Matrix z = (*xaug_ * points_.middleCols(c0, w)).cwiseMax(0.0);
    for (Eigen::Index c = 0; c < w; ++c) z.col(c) /= raw_norms_(c0 + c);
    return z;
  }

  std::shared_ptr<const std::vector<Direction>> source_;
  std::vector<std::size_t> source_index_;
  std::shared_ptr<const Matrix> xaug_;
  Matrix points_;
  Vector raw_norms_;
  std::shared_ptr<const Matrix> dense_;
};

inline constexpr double kDefaultDropTol = 1e-12;

/// Evaluates relu(abar . x + bbar) over the training inputs for every
/// direction; vectors with norm <= drop_tol are discarded.
inline Dictionary build_dictionary(const Dataset& train, std::vector<Direction> directions,
                                   double drop_tol = kDefaultDropTol, std::size_t threads = 1) {
  const Eigen::Index d = train.dim();
  for (const auto& dir : directions) {
    if (dir.dim() != d) throw InvalidArgument("build_dictionary: direction dimension does not match dataset");
  }
  const Eigen::Index n = train.size();
  const std::size_t m = directions.size();
  auto xaug = std::make_shared<Matrix>(n, d + 1);
  xaug->leftCols(d) = train.inputs();
  xaug->col(d).setOnes();

  constexpr std::size_t kBlock = 512;
  Vector norms(static_cast<Eigen::Index>(m));
  parallel_for((m + kBlock - 1) / kBlock, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t blk = lo; blk < hi; ++blk) {
      const std::size_t j0 = blk * kBlock;
      const std::size_t j1 = std::min(m, j0 + kBlock);
      Matrix p(d + 1, static_cast<Eigen::Index>(j1 - j0));
      for (std::size_t j = j0; j < j1; ++j) p.col(static_cast<Eigen::Index>(j - j0)) = directions[j].point();
      const Matrix z = (*xaug * p).cwiseMax(0.0);
      norms.segment(static_cast<Eigen::Index>(j0), static_cast<Eigen::Index>(j1 - j0)) = z.colwise().norm().transpose();
    }
  });

  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < m; ++j) {
    if (norms(static_cast<Eigen::Index>(j)) > drop_tol) live.push_back(j);
  }
  if (live.empty()) throw NumericalError("build_dictionary: every atom vanishes on the training set");
  Vector raw(static_cast<Eigen::Index>(live.size()));
  for (std::size_t k = 0; k < live.size(); ++k) raw(static_cast<Eigen::Index>(k)) = norms(static_cast<Eigen::Index>(live[k]));
  const bool dense = Dictionary::fits_dense(n, live.size());
  return Dictionary(std::make_shared<const std::vector<Direction>>(std::move(directions)), std::move(live),
                    std::move(xaug), std::move(raw), dense);
}

}  // namespace gsn
