// Acceptance checks. Usage: gsn_acceptance [criterion ...]; no arguments runs
// all ten. Prints one PASS/FAIL line per criterion and exits non-zero if any fail.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "gsn/bench.hpp"
#include "gsn/parallel.hpp"
#include "support/oracles.hpp"

using namespace gsn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

void info(const std::string& line) { std::cout << "  info: " << line << std::endl; }

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

const std::size_t kThreads = default_threads();

Outcome c1_oga_oracle() {
  Stopwatch sw;
  Rng rng(20240101);
  std::size_t steps = 0, mismatches = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const auto n = static_cast<Eigen::Index>(4 + rng.below(9));   // 4..12 points
    const auto k = static_cast<Eigen::Index>(8 + rng.below(33));  // 8..40 atoms
    const auto r = oracle::greedy_against_brute_force(rng, n, k, 1e-10);
    steps += r.steps;
    mismatches += r.mismatches;
    worst = std::max(worst, r.worst_gap);
  }
  const double t = sw.seconds();
  return {mismatches == 0 && t <= 60.0,
          fmt("200 instances, %zu steps, %zu mismatches, worst score gap %.2e, %.1f s (limit 60 s)", steps,
              mismatches, worst, t)};
}

Outcome c2_invariants() {
  Stopwatch sw;
  bool ok = true;
  for (const char* id : {"ex1", "ex2", "ex3", "ex4", "ex5", "ex6"}) {
    Stopwatch one;
    const auto cfg = ExperimentConfig::for_example(id);
    const Datasets data = make_datasets(cfg);
    std::map<std::string, double> timings;
    const auto g = run_greedy_stages(cfg, data, kThreads, timings);
    const auto& p = g.greedy.path;
    const bool good = p.monotone && p.max_orthogonality_defect <= 1e-10;
    ok = ok && good;
    info(fmt("%s: %zu greedy steps, monotone=%s, max |<f_m,q_j>|/|f| = %.2e, %.1f s", id, p.size(),
             p.monotone ? "yes" : "no", p.max_orthogonality_defect, one.seconds()));
  }
  return {ok, fmt("greedy stages of ex1..ex6 at default settings, %.1f s", sw.seconds())};
}

/// Least-squares slope of y on x over the first n points.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t n) {
  const double mx = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

Outcome c3_convex_hull_rate() {
  Stopwatch sw;
  double worst_slope = -std::numeric_limits<double>::infinity();
  for (std::uint64_t inst = 0; inst < 10; ++inst) {
    Rng rng(900 + inst);
    Matrix x(64, 2);
    for (Eigen::Index i = 0; i < 64; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) x(i, j) = rng.uniform(-1.0, 1.0);
    const Dataset data(x, Vector::Zero(64), {{-1, 1}, {-1, 1}});
    const Dictionary all = build_dictionary(data, sample_gaussian_sphere(2, 800, 50 + inst));
    std::vector<std::size_t> first(500);
    std::iota(first.begin(), first.end(), std::size_t{0});
    const Matrix atoms = all.select(first).features();

    Vector lambda(500);
    for (Eigen::Index k = 0; k < 500; ++k) lambda(k) = -std::log(1.0 - rng.uniform());
    lambda /= lambda.sum();
    const Vector f = atoms * lambda;

    MatrixAtoms view{&atoms};
    GreedyState state(view, f);
    std::vector<double> ln_n, ln_r;
    for (std::size_t n = 1; n <= 64; ++n) {
      if (!oga_step(state)) break;
      const double r = state.residual_norm();
      if (n >= 4 && r > 1e-12 * f.norm()) {
        ln_n.push_back(std::log(static_cast<double>(n)));
        ln_r.push_back(std::log(r));
      }
    }
    const double slope = fit_slope(ln_n, ln_r, ln_n.size());
    worst_slope = std::max(worst_slope, slope);
    info(fmt("instance %llu: slope %.3f over %zu points (%.3f over N <= 32)", static_cast<unsigned long long>(inst),
             slope, ln_n.size(), fit_slope(ln_n, ln_r, std::min<std::size_t>(29, ln_n.size()))));
  }
  const double t = sw.seconds();
  return {worst_slope <= -0.4 && t <= 10.0,
          fmt("10 convex combinations of 500 ReLU atoms on 64 points, worst log-log slope %.3f (limit -0.4), %.1f s",
              worst_slope, t)};
}

Outcome c4_gradients() {
  Stopwatch sw;
  Rng rng(4444);
  std::size_t checked = 0, skipped = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto c = oracle::random_gradient_case(rng);
    const auto r = oracle::check_gradients(c.params, c.x, c.y, 1e-6, 1e-4);
    checked += r.checked;
    skipped += r.skipped;
    worst = std::max(worst, r.max_rel);
  }
  const double t = sw.seconds();
  return {worst <= 1e-5 && t <= 30.0,
          fmt("50 pairs, %zu components checked, %zu near kinks skipped, max relative error %.2e, %.2f s", checked,
              skipped, worst, t)};
}

Outcome c5_tau() {
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (Eigen::Index d : {1, 2, 4, 5}) {
    for (int k = 0; k <= 3; ++k) {
      const double m = gauss_kronrod<double, 61>::integrate(
          [&](double z) { return std::pow(z, k) * tau(z, d); }, -inf, inf, 15, 1e-14);
      worst = std::max(worst, std::abs(m));
    }
  }
  const double t0 = tau(0.0, 1);
  return {worst <= 1e-8 && std::abs(t0 - -0.598413) <= 1e-6,
          fmt("max |moment k=0..3| over d=1,2,4,5 = %.2e, tau(0, d=1) = %.7f", worst, t0)};
}

ExperimentConfig ex1_desk() {
  auto c = ExperimentConfig::for_example("ex1");
  c.train_layout = Layout::grid;
  c.gsn_epochs = 0;
  c.baseline = false;
  return c;
}

Outcome c6_example1() {
  Stopwatch sw;
  const auto rep = run_gsn_pipeline(ex1_desk(), kThreads);
  const double t = sw.seconds();
  {
    auto c = ex1_desk();
    c.train_layout = Layout::random_uniform;
    const auto r = run_gsn_pipeline(c, kThreads);
    info(fmt("random-uniform training layout: N = %zu, rel_l2 = %.4f", r.node_count, r.gsn_init.rel_l2));
  }
  const bool ok = rep.gsn_init.rel_l2 <= 5e-2 && rep.node_count >= 15 && rep.node_count <= 40 && t <= 120.0;
  return {ok, fmt("grid training layout, M = %zu, %zu atoms after pruning, N = %zu, GSN-init rel_l2 = %.4f "
                  "(limit 5e-2, N in [15, 40]), %.1f s",
                  rep.dictionary.sampled, rep.dictionary.after_prune, rep.node_count, rep.gsn_init.rel_l2, t)};
}

Outcome c7_example2() {
  bool ok = true;
  std::string summary;
  for (std::size_t epochs : {std::size_t{10000}, std::size_t{2000}}) {
    Stopwatch sw;
    auto c = ExperimentConfig::for_example("ex2");
    c.fixed_nodes = 40;
    c.gsn_epochs = c.random_epochs = epochs;
    const auto rep = run_gsn_pipeline(c, kThreads);
    const double t = sw.seconds();
    const double ratio = rep.random_trained->rel_l2 / rep.gsn_trained.rel_l2;
    const double need = epochs == 10000 ? 5.0 : 3.0;
    const double limit = epochs == 10000 ? 1800.0 : 360.0;
    ok = ok && ratio >= need && t <= limit;
    info(fmt("%zu epochs: GSN-trained rel_l2 %.4f, best-of-%zu random %.4f, ratio %.1f (need %.0f), %.1f s "
             "(limit %.0f s)",
             epochs, rep.gsn_trained.rel_l2, c.n_restarts, rep.random_trained->rel_l2, ratio, need, t, limit));
    summary += fmt("%s%zu epochs ratio %.1f", summary.empty() ? "" : ", ", epochs, ratio);
  }
  return {ok, summary};
}

Outcome c8_pruning() {
  bool ok = true;
  std::string summary;
  for (const char* id : {"ex1", "ex3"}) {
    auto c = ExperimentConfig::for_example(id);
    if (c.target == "ex1") c.train_layout = Layout::grid;
    c.gsn_epochs = 0;
    c.baseline = false;
    const auto pruned = run_gsn_pipeline(c, kThreads);
    c.prune = false;
    const auto plain = run_gsn_pipeline(c, kThreads);
    const double need = find_target(id).dim == 1 ? 0.30 : 0.50;
    const double frac = pruned.dictionary.pruned_fraction();
    const double change = std::abs(pruned.gsn_init.rel_l2 - plain.gsn_init.rel_l2) / plain.gsn_init.rel_l2;
    const bool good = frac >= need && change <= 0.10;
    ok = ok && good;
    info(fmt("%s: %.1f%% of %zu sampled directions rejected (need %.0f%%), %.1f%% of live atoms removed, "
             "GSN-init rel_l2 %.4f pruned vs %.4f unpruned (change %.1f%%, limit 10%%)",
             id, 100 * frac, pruned.dictionary.sampled, 100 * need, 100 * pruned.dictionary.live_pruned_fraction(),
             pruned.gsn_init.rel_l2, plain.gsn_init.rel_l2, 100 * change));
    summary += fmt("%s%s removed %.1f%% (need %.0f%%), error change %.1f%%", summary.empty() ? "" : "; ", id,
                   100 * frac, 100 * need, 100 * change);
  }
  return {ok, summary};
}

Outcome c9_determinism() {
  Stopwatch sw;
  const auto c = ExperimentConfig::for_example("ex1");
  const json a = reproducible_part(report_to_json(run_gsn_pipeline(c, kThreads)));
  const json b = reproducible_part(report_to_json(run_gsn_pipeline(c, kThreads)));
  const bool same = a.dump() == b.dump();
  return {same, fmt("two full ex1 runs with seed 0: manifests %s (%zu bytes), %.1f s", same ? "identical" : "differ",
                    a.dump().size(), sw.seconds())};
}

Outcome c10_example6() {
  Stopwatch sw;
  auto c = ExperimentConfig::for_example("ex6");
  c.n_train = 2000;
  c.gsn_epochs = c.random_epochs = 2000;
  const auto rep = node_sweep(c, kThreads);
  const double t = sw.seconds();
  std::size_t wins = 0;
  for (const auto& p : rep.points) {
    const bool win = p.available && p.gsn_trained.rel_l2 <= p.random_trained->rel_l2;
    wins += win;
    info(fmt("N = %zu: GSN-trained %.4f, random %.4f%s", p.nodes, p.gsn_trained.rel_l2,
             p.available ? p.random_trained->rel_l2 : std::nan(""), win ? "" : "  (random better)"));
  }
  return {wins >= 4 && t <= 1200.0,
          fmt("GSN-trained <= random at %zu of %zu points (need 4), %.1f s (limit 1200 s)", wins, rep.points.size(), t)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "OGA oracle equivalence", c1_oga_oracle},
      {2, "residual monotonicity and orthogonality", c2_invariants},
      {3, "convex-hull rate", c3_convex_hull_rate},
      {4, "gradient correctness", c4_gradients},
      {5, "tau kernel", c5_tau},
      {6, "Example 1 reproduction", c6_example1},
      {7, "Example 2 separation", c7_example2},
      {8, "pruning efficacy", c8_pruning},
      {9, "determinism", c9_determinism},
      {10, "Example 6 sweep shape", c10_example6},
  };
  std::vector<int> wanted;
  for (int k = 1; k < argc; ++k) wanted.push_back(std::atoi(argv[k]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " C" << c.id << " " << c.title << ": " << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
