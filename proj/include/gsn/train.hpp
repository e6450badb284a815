#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gsn/core.hpp"
#include "gsn/metrics.hpp"
#include "gsn/rng.hpp"

namespace gsn {

struct TrainConfig {
  std::size_t epochs = 10000;
  std::size_t batch_size = 1;
  double initial_lr = 1e-3;
  double decay_rate = 4.6e-4;
  std::uint64_t seed = 0;
  bool shuffle = true;
  /// Train the outer weights only.
  bool freeze_inner = false;

  void validate() const {
    if (batch_size < 1) throw InvalidArgument("train: batch size must be at least 1");
    if (!(initial_lr > 0.0)) throw InvalidArgument("train: initial learning rate must be positive");
    if (!(decay_rate >= 0.0)) throw InvalidArgument("train: decay rate must be non-negative");
  }
};

enum class InitKind { gsn_network, truncated_normal };

struct InitSpec {
  InitKind kind = InitKind::truncated_normal;
  double stddev = 0.05;
  /// Hidden biases start at zero, as dense layers do by default.
  bool zero_bias = true;
  std::uint64_t seed = 0;
};

/// Unconstrained trainable parameters c_n relu(a_n . x + b_n), stored flat as
/// [a (n x d, column-major) | b (n) | c (n)].
class NetworkParams {
 public:
  NetworkParams(Eigen::Index nodes, Eigen::Index dim) : n_(nodes), d_(dim), theta_(Vector::Zero(nodes * (dim + 2))) {
    if (dim < 1 || nodes < 0) throw InvalidArgument("network params: invalid shape");
  }

  static NetworkParams from_network(const ShallowNetwork& net) {
    NetworkParams p(static_cast<Eigen::Index>(net.size()), net.input_dim());
    for (std::size_t k = 0; k < net.size(); ++k) {
      const auto n = static_cast<Eigen::Index>(k);
      const Node& node = net.nodes()[k];
      p.a().row(n) = node.direction.a().transpose();
      p.b()(n) = node.direction.b();
      p.c()(n) = node.outer_weight;
    }
    return p;
  }

  /// Rescales every node onto the sphere; nodes with zero inner weights
  /// contribute nothing and are dropped.
  ShallowNetwork to_network() const {
    ShallowNetwork net(d_);
    for (Eigen::Index n = 0; n < n_; ++n) {
      const Vector an = a().row(n).transpose();
      if (an.squaredNorm() + b()(n) * b()(n) == 0.0) continue;
      auto [dir, w] = rescale_node(an, b()(n), c()(n));
      net.add(std::move(dir), w);
    }
    return net;
  }

  Eigen::Index nodes() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return d_; }

  Eigen::Map<Matrix> a() { return {theta_.data(), n_, d_}; }
  Eigen::Map<const Matrix> a() const { return {theta_.data(), n_, d_}; }
  Eigen::VectorBlock<Vector> b() { return theta_.segment(n_ * d_, n_); }
  Eigen::VectorBlock<const Vector> b() const { return theta_.segment(n_ * d_, n_); }
  Eigen::VectorBlock<Vector> c() { return theta_.segment(n_ * (d_ + 1), n_); }
  Eigen::VectorBlock<const Vector> c() const { return theta_.segment(n_ * (d_ + 1), n_); }

  Vector& flat() noexcept { return theta_; }
  const Vector& flat() const noexcept { return theta_; }

  Vector predict(const Matrix& x) const {
    if (x.cols() != d_) throw InvalidArgument("network params: dimension mismatch");
    const Matrix z = ((x * a().transpose()).rowwise() + b().transpose()).cwiseMax(0.0);
    return z * c();
  }

  bool operator==(const NetworkParams& o) const { return n_ == o.n_ && d_ == o.d_ && theta_ == o.theta_; }

 private:
  Eigen::Index n_;
  Eigen::Index d_;
  Vector theta_;
};

inline NetworkParams random_params(Eigen::Index nodes, Eigen::Index dim, const InitSpec& spec) {
  if (!(spec.stddev > 0.0)) throw InvalidArgument("init: stddev must be positive");
  NetworkParams p(nodes, dim);
  Rng rng(spec.seed, Stream::init);
  auto a = p.a();
  for (Eigen::Index n = 0; n < nodes; ++n) {
    for (Eigen::Index k = 0; k < dim; ++k) a(n, k) = rng.truncated_normal(spec.stddev);
  }
  for (Eigen::Index n = 0; n < nodes; ++n) p.b()(n) = spec.zero_bias ? 0.0 : rng.truncated_normal(spec.stddev);
  for (Eigen::Index n = 0; n < nodes; ++n) p.c()(n) = rng.truncated_normal(spec.stddev);
  return p;
}

/// Scratch buffers for one mini-batch.
struct GradWorkspace {
  Matrix z;
  Vector err;
  Matrix gate;
};

/// Mean squared error over the batch and its gradient in the flat layout of
/// NetworkParams. relu'(0) is taken as 0.
inline double loss_and_gradients(const NetworkParams& p, const Matrix& x, const Vector& y, Vector& grad,
                                 GradWorkspace& ws) {
  if (x.rows() == 0) throw InvalidArgument("loss_and_gradients: empty batch");
  if (x.rows() != y.size() || x.cols() != p.dim()) throw InvalidArgument("loss_and_gradients: shape mismatch");
  const Eigen::Index n = p.nodes();
  const Eigen::Index d = p.dim();
  const double bsz = static_cast<double>(x.rows());

  ws.z.noalias() = x * p.a().transpose();
  ws.z.rowwise() += p.b().transpose();
  ws.gate = (ws.z.array() > 0.0).cast<double>();
  ws.z = ws.z.cwiseMax(0.0);
  ws.err.noalias() = ws.z * p.c();
  ws.err -= y;
  const double loss = ws.err.squaredNorm() / bsz;

  grad.resize(p.flat().size());
  ws.err *= 2.0 / bsz;
  grad.segment(n * (d + 1), n).noalias() = ws.z.transpose() * ws.err;
  // dL/dz = err * c^T on open gates
  ws.gate.array().rowwise() *= p.c().transpose().array();
  ws.gate.array().colwise() *= ws.err.array();
  Eigen::Map<Matrix>(grad.data(), n, d).noalias() = ws.gate.transpose() * x;
  grad.segment(n * d, n).noalias() = ws.gate.colwise().sum().transpose();
  return loss;
}

inline double loss_and_gradients(const NetworkParams& p, const Matrix& x, const Vector& y, Vector& grad) {
  GradWorkspace ws;
  return loss_and_gradients(p, x, y, grad, ws);
}

inline double mse(const NetworkParams& p, const Matrix& x, const Vector& y) {
  return (p.predict(x) - y).squaredNorm() / static_cast<double>(y.size());
}

inline double lr_at(std::size_t epoch, const TrainConfig& cfg) {
  return cfg.initial_lr * std::exp(-cfg.decay_rate * static_cast<double>(epoch));
}

struct OptimizerState {
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double eps = 1e-8;

  Vector m;
  Vector v;
  std::uint64_t step = 0;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  explicit OptimizerState(Eigen::Index size = 0) : m(Vector::Zero(size)), v(Vector::Zero(size)) {}
};

/// Bias-corrected Adam step.
inline void adam_update(OptimizerState& st, Vector& params, const Vector& grads, double lr) {
  if (params.size() != grads.size() || st.m.size() != params.size()) {
    throw InvalidArgument("adam_update: shape mismatch");
  }
  ++st.step;
  st.beta1_pow *= OptimizerState::beta1;
  st.beta2_pow *= OptimizerState::beta2;
  st.m = OptimizerState::beta1 * st.m + (1.0 - OptimizerState::beta1) * grads;
  st.v = OptimizerState::beta2 * st.v + (1.0 - OptimizerState::beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - st.beta1_pow;
  const double c2 = 1.0 - st.beta2_pow;
  params.array() -= lr * (st.m.array() / c1) / ((st.v.array() / c2).sqrt() + OptimizerState::eps);
}

struct TrainResult {
  NetworkParams params;
  ShallowNetwork network;
  std::vector<double> train_loss;       // full training MSE after each epoch
  std::vector<double> validation_loss;  // empty without a validation set
};

inline TrainResult train_params(NetworkParams params, const Dataset& train_set, const Dataset* val_set,
                                const TrainConfig& cfg) {
  cfg.validate();
  if (params.dim() != train_set.dim()) throw InvalidArgument("train: network and dataset dimensions differ");
  if (val_set && val_set->dim() != train_set.dim()) throw InvalidArgument("train: validation dimension mismatch");

  TrainResult out{params, ShallowNetwork(params.dim()), {}, {}};
  const Eigen::Index n_train = train_set.size();
  const Eigen::Index n = params.nodes();
  const Eigen::Index d = params.dim();
  const Eigen::Index bsz_full = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.batch_size), n_train);

  OptimizerState opt(params.flat().size());
  Rng shuffler(cfg.seed, Stream::shuffle);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Matrix xb;
  Vector yb;
  Vector grad;
  GradWorkspace ws;
  const bool full_batch = bsz_full == n_train;

  out.train_loss.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(epoch, cfg);
    if (cfg.shuffle) shuffler.shuffle(order);
    for (Eigen::Index start = 0; start < n_train; start += bsz_full) {
      const Eigen::Index len = std::min(bsz_full, n_train - start);
      if (full_batch) {
        loss_and_gradients(out.params, train_set.inputs(), train_set.targets(), grad, ws);
      } else {
        xb.resize(len, d);
        yb.resize(len);
        for (Eigen::Index k = 0; k < len; ++k) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + k)];
          xb.row(k) = train_set.inputs().row(src);
          yb(k) = train_set.targets()(src);
        }
        loss_and_gradients(out.params, xb, yb, grad, ws);
      }
      if (cfg.freeze_inner) grad.head(n * (d + 1)).setZero();
      adam_update(opt, out.params.flat(), grad, lr);
    }
    const double loss = mse(out.params, train_set.inputs(), train_set.targets());
    if (!std::isfinite(loss)) throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch));
    out.train_loss.push_back(loss);
    if (val_set) out.validation_loss.push_back(mse(out.params, val_set->inputs(), val_set->targets()));
  }
  out.network = out.params.to_network();
  return out;
}

/// Fine-tunes a network; zero epochs hands back `net0` untouched.
inline TrainResult train(const ShallowNetwork& net0, const Dataset& train_set, const Dataset* val_set,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.epochs == 0) {
    if (net0.input_dim() != train_set.dim()) throw InvalidArgument("train: network and dataset dimensions differ");
    return {NetworkParams::from_network(net0), net0, {}, {}};
  }
  return train_params(NetworkParams::from_network(net0), train_set, val_set, cfg);
}

struct RestartRow {
  std::uint64_t seed = 0;
  ErrorSet test_error;
  double final_train_loss = 0.0;
};

struct MultiRestartResult {
  std::size_t best = 0;
  std::vector<RestartRow> rows;
  TrainResult best_run;
};

/// Trains `n_restarts` truncated-normal networks under seeds base_seed + k
/// and keeps the one with the lowest test error.
inline MultiRestartResult multi_restart(Eigen::Index nodes, const Dataset& train_set, const Dataset* val_set,
                                        const Dataset& test_set, const TrainConfig& cfg, InitSpec init,
                                        std::size_t n_restarts, std::uint64_t base_seed) {
  if (n_restarts < 1) throw InvalidArgument("multi_restart: need at least one restart");
  std::optional<MultiRestartResult> out;
  for (std::size_t k = 0; k < n_restarts; ++k) {
    const std::uint64_t seed = base_seed + k;
    init.seed = seed;
    TrainConfig run_cfg = cfg;
    run_cfg.seed = seed;
    TrainResult run = train_params(random_params(nodes, train_set.dim(), init), train_set, val_set, run_cfg);
    RestartRow row;
    row.seed = seed;
    row.test_error = errors_from(run.params.predict(test_set.inputs()), test_set.targets());
    row.final_train_loss = run.train_loss.empty() ? mse(run.params, train_set.inputs(), train_set.targets())
                                                  : run.train_loss.back();
    if (!out) {
      out = MultiRestartResult{0, {row}, std::move(run)};
    } else {
      out->rows.push_back(row);
      if (row.test_error.abs_l2 < out->rows[out->best].test_error.abs_l2) {
        out->best = k;
        out->best_run = std::move(run);
      }
    }
  }
  return std::move(*out);
}

}  // namespace gsn
