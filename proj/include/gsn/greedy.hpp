#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gsn/core.hpp"
#include "gsn/sampling.hpp"

namespace gsn {

struct GreedyOptions {
  std::size_t max_iter = 100;
  /// An atom counts as inside the current span when 1 - energy <= span_tol.
  double span_tol = 1e-10;
  /// Stop once |f_m| <= residual_tol_rel * |f|.
  double residual_tol_rel = 1e-12;
  /// Keep the recovered outer weights of every iteration in the path.
  bool record_weights = false;
};

enum class StopReason { none, max_iter, residual_tol, span_exhausted };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::none: return "none";
    case StopReason::max_iter: return "max-iter";
    case StopReason::residual_tol: return "residual-tol";
    case StopReason::span_exhausted: return "span-exhausted";
  }
  return "?";
}

struct StepResult {
  std::optional<std::size_t> selected;
  StopReason stop = StopReason::none;

  explicit operator bool() const noexcept { return selected.has_value(); }
};

/// Unit-norm atom columns held in a plain matrix.
struct MatrixAtoms {
  const Matrix* m;

  Eigen::Index rows() const noexcept { return m->rows(); }
  Eigen::Index cols() const noexcept { return m->cols(); }
  Vector column(Eigen::Index j) const { return m->col(j); }
  Vector correlate(const Vector& v) const { return m->transpose() * v; }
};

/// Orthogonal greedy state over unit-norm atoms (a MatrixAtoms or a
/// Dictionary; anything with rows/cols/column/correlate).
///
/// Selection maximizes <f_m, g>^2 / (1 - |P_m g|^2), the squared residual
/// reduction obtained by adding g to the span, which is the same as minimizing
/// dist(f, span{g_1..g_m, g}). Per-atom scores <f_m, g> and projected energies
/// |P_m g|^2 are updated with one product D^T q per step.
template <typename Atoms>
class GreedyState {
 public:
  GreedyState(const Atoms& atoms, const Vector& target, GreedyOptions opts = {})
      : atoms_(&atoms), opts_(opts), residual_(target), target_norm_(target.norm()) {
    if (atoms.rows() != target.size()) throw InvalidArgument("greedy: atom length does not match target length");
    if (atoms.cols() < 1) throw InvalidArgument("greedy: empty dictionary");
    if (!target.allFinite()) throw NumericalError("greedy: non-finite target");
    const Eigen::Index cap = std::min<Eigen::Index>(atoms.rows(), atoms.cols());
    basis_.resize(atoms.rows(), cap);
    mix_.setZero(cap, cap);
    coeffs_.resize(cap);
    energy_.setZero(atoms.cols());
    score_ = atoms.correlate(residual_);
    available_.assign(static_cast<std::size_t>(atoms.cols()), 1);
  }

  std::size_t size() const noexcept { return selected_.size(); }
  const std::vector<std::size_t>& selected() const noexcept { return selected_; }
  auto basis() const { return basis_.leftCols(static_cast<Eigen::Index>(size())); }
  /// Upper-triangular R with [g_1 .. g_m] = Q R.
  auto mix_matrix() const {
    const auto m = static_cast<Eigen::Index>(size());
    return mix_.topLeftCorner(m, m);
  }
  /// <f, q_j> for the current basis.
  auto projection_coefficients() const { return coeffs_.head(static_cast<Eigen::Index>(size())); }
  const Vector& residual() const noexcept { return residual_; }
  double residual_norm() const { return residual_.norm(); }
  double target_norm() const noexcept { return target_norm_; }
  const Vector& atom_energy() const noexcept { return energy_; }
  const Vector& atom_scores() const noexcept { return score_; }
  const GreedyOptions& options() const noexcept { return opts_; }

  /// Coefficients gamma on the first n selected unit atoms reproducing the
  /// projection of f onto their span.
  Vector coefficients(std::size_t n) const {
    if (n > size()) throw InvalidArgument("greedy: requested more atoms than selected");
    const auto m = static_cast<Eigen::Index>(n);
    if (m == 0) return Vector();
    return mix_.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(coeffs_.head(m));
  }

  StepResult step() {
    const double tol = opts_.residual_tol_rel * target_norm_;
    if (residual_.norm() <= tol) return {std::nullopt, StopReason::residual_tol};
    if (static_cast<Eigen::Index>(size()) >= basis_.cols()) return {std::nullopt, StopReason::span_exhausted};

    for (;;) {
      const auto best = best_atom();
      if (!best) return {std::nullopt, StopReason::span_exhausted};
      const auto j = static_cast<Eigen::Index>(*best);
      const auto m = static_cast<Eigen::Index>(size());

      // Two passes of classical Gram-Schmidt.
      Vector u = atoms_->column(j);
      Vector c = Vector::Zero(m);
      for (int pass = 0; pass < 2 && m > 0; ++pass) {
        const Vector cc = basis_.leftCols(m).transpose() * u;
        u.noalias() -= basis_.leftCols(m) * cc;
        c += cc;
      }
      const double rho = u.norm();
      if (!(rho * rho > 0.5 * opts_.span_tol)) {
        // Incremental energy overstated the deficit; the atom is in the span.
        available_[*best] = 0;
        energy_(j) = 1.0;
        continue;
      }
      const Vector q = u / rho;
      basis_.col(m) = q;
      mix_.col(m).head(m) = c;
      mix_(m, m) = rho;

      const double alpha = residual_.dot(q);
      residual_.noalias() -= alpha * q;
      coeffs_(m) = alpha;

      const Vector w = atoms_->correlate(q);
      energy_.array() += w.array().square();
      score_.noalias() -= alpha * w;
      available_[*best] = 0;
      selected_.push_back(*best);
      return {*best, StopReason::none};
    }
  }

 private:
  std::optional<std::size_t> best_atom() const {
    std::optional<std::size_t> best;
    double best_score = -1.0;
    for (Eigen::Index j = 0; j < atoms_->cols(); ++j) {
      if (!available_[static_cast<std::size_t>(j)]) continue;
      const double deficit = 1.0 - energy_(j);
      if (!(deficit > opts_.span_tol)) continue;
      const double s = score_(j) * score_(j) / deficit;
      if (s > best_score) {
        best_score = s;
        best = static_cast<std::size_t>(j);
      }
    }
    return best;
  }

  const Atoms* atoms_;
  GreedyOptions opts_;
  Matrix basis_;
  Matrix mix_;
  Vector coeffs_;
  Vector residual_;
  Vector energy_;
  Vector score_;
  std::vector<char> available_;
  std::vector<std::size_t> selected_;
  double target_norm_;
};

template <typename Atoms>
StepResult oga_step(GreedyState<Atoms>& state) {
  return state.step();
}

struct GreedyRecord {
  std::size_t iteration = 0;  // m, 1-based
  std::size_t atom = 0;       // position in the dictionary
  std::size_t source_index = 0;
  double residual_norm = 0.0;
  double train_error = 0.0;       // rms over training points
  double validation_error = 0.0;  // rms over validation points (NaN without a validation set)
  std::vector<double> weights;    // outer weights, only when record_weights
};

struct GreedyPath {
  std::vector<GreedyRecord> records;
  StopReason stop = StopReason::none;
  /// Largest |<f_m, q_j>| / |f| seen over the run.
  double max_orthogonality_defect = 0.0;
  /// Residual norm never increased.
  bool monotone = true;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }
};

/// Everything needed to rebuild the greedy network at any size n <= selected.
struct GreedyResult {
  GreedyPath path;
  std::vector<std::size_t> selected;  // dictionary positions in selection order
  std::vector<Direction> directions;
  Vector raw_norms;
  Matrix mix;
  Vector projection;

  std::size_t size() const noexcept { return selected.size(); }

  Vector coefficients(std::size_t n) const {
    if (n > size()) throw InvalidArgument("greedy: node count exceeds the greedy path");
    const auto m = static_cast<Eigen::Index>(n);
    if (m == 0) return Vector();
    return mix.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(projection.head(m));
  }

  /// Outer weights on relu(abar . x + bbar), i.e. gamma / raw_norm.
  Vector outer_weights(std::size_t n) const {
    return coefficients(n).cwiseQuotient(raw_norms.head(static_cast<Eigen::Index>(n)));
  }

  ShallowNetwork network(std::size_t n) const {
    if (directions.empty()) throw InvalidArgument("greedy: no directions recorded");
    const Vector w = outer_weights(n);
    ShallowNetwork net(directions.front().dim());
    for (std::size_t k = 0; k < n; ++k) net.add(directions[k], w(static_cast<Eigen::Index>(k)));
    return net;
  }

  std::vector<Direction> nodes(std::size_t n) const {
    if (n > size()) throw InvalidArgument("greedy: node count exceeds the greedy path");
    return {directions.begin(), directions.begin() + static_cast<std::ptrdiff_t>(n)};
  }
};

namespace detail {

inline Vector relu_column(const Matrix& inputs, const Direction& dir) {
  return ((inputs * dir.a()).array() + dir.b()).cwiseMax(0.0).matrix();
}

}  // namespace detail

/// Runs OGA on the training targets until a stop condition, scoring each
/// iterate on the validation set with exactly recovered outer weights.
inline GreedyResult oga_run(const Dictionary& dict, const Dataset& train, const Dataset* validation,
                            const GreedyOptions& opts) {
  if (dict.empty()) throw InvalidArgument("oga_run: empty dictionary");
  if (dict.points() != train.size()) throw InvalidArgument("oga_run: dictionary does not match training set");
  if (validation && validation->dim() != train.dim()) throw InvalidArgument("oga_run: validation dimension mismatch");

  GreedyResult out;
  if (opts.max_iter == 0) {
    out.path.stop = StopReason::max_iter;
    return out;
  }
  GreedyState<Dictionary> state(dict, train.targets(), opts);
  const double fnorm = std::max(state.target_norm(), std::numeric_limits<double>::min());
  const double sqrt_n = std::sqrt(static_cast<double>(train.size()));
  Matrix val_act;
  if (validation) val_act.resize(validation->size(), 0);
  double prev = state.residual_norm();

  while (state.size() < opts.max_iter) {
    const StepResult r = state.step();
    if (!r) {
      out.path.stop = r.stop;
      break;
    }
    const std::size_t atom = *r.selected;
    out.selected.push_back(atom);
    out.directions.push_back(dict.direction(atom));

    GreedyRecord rec;
    rec.iteration = state.size();
    rec.atom = atom;
    rec.source_index = dict.source_indices()[atom];
    rec.residual_norm = state.residual_norm();
    rec.train_error = rec.residual_norm / sqrt_n;

    if (rec.residual_norm > prev) out.path.monotone = false;
    prev = rec.residual_norm;
    if (state.size() > 0) {
      const double defect = (state.basis().transpose() * state.residual()).cwiseAbs().maxCoeff() / fnorm;
      out.path.max_orthogonality_defect = std::max(out.path.max_orthogonality_defect, defect);
    }

    const Vector gamma = state.coefficients(state.size());
    Vector raw(static_cast<Eigen::Index>(out.selected.size()));
    for (std::size_t k = 0; k < out.selected.size(); ++k) {
      raw(static_cast<Eigen::Index>(k)) = dict.raw_norms()(static_cast<Eigen::Index>(out.selected[k]));
    }
    const Vector w = gamma.cwiseQuotient(raw);
    if (validation) {
      val_act.conservativeResize(Eigen::NoChange, val_act.cols() + 1);
      val_act.col(val_act.cols() - 1) = detail::relu_column(validation->inputs(), out.directions.back());
      const Vector pred = val_act * w;
      rec.validation_error = (pred - validation->targets()).norm() / std::sqrt(static_cast<double>(validation->size()));
    } else {
      rec.validation_error = std::numeric_limits<double>::quiet_NaN();
    }
    if (opts.record_weights) rec.weights.assign(w.data(), w.data() + w.size());
    out.path.records.push_back(std::move(rec));
  }
  if (out.path.stop == StopReason::none) out.path.stop = StopReason::max_iter;

  const auto m = static_cast<Eigen::Index>(state.size());
  out.raw_norms.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) out.raw_norms(k) = dict.raw_norms()(static_cast<Eigen::Index>(out.selected[static_cast<std::size_t>(k)]));
  out.mix = state.mix_matrix();
  out.projection = state.projection_coefficients();
  return out;
}

inline GreedyResult oga_run(const Dictionary& dict, const Dataset& train, const Dataset& validation,
                            const GreedyOptions& opts) {
  return oga_run(dict, train, &validation, opts);
}

/// Node count with the smallest validation error; ties go to the smaller count.
inline std::size_t select_model(const GreedyPath& path) {
  if (path.empty()) throw InvalidArgument("select_model: empty greedy path");
  std::size_t best = path.records.front().iteration;
  double best_err = path.records.front().validation_error;
  for (const auto& rec : path.records) {
    if (rec.validation_error < best_err) {
      best_err = rec.validation_error;
      best = rec.iteration;
    }
  }
  return best;
}

}  // namespace gsn
