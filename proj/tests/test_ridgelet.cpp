#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "gsn/ridgelet.hpp"

using namespace gsn;
using boost::math::quadrature::gauss_kronrod;

namespace {

Dataset grid_dataset(const std::string& id, std::size_t n) {
  return generate_dataset(find_target(id), n, 0, Layout::grid);
}

Dataset constant_one(std::size_t n) {
  Matrix x(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return Dataset(x, Vector::Ones(static_cast<Eigen::Index>(n)), {{-1, 1}});
}

double pearson(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  return ac.dot(bc) / (ac.norm() * bc.norm());
}

}  // namespace

TEST(Tau, ValueAtZeroAndSymmetry) {
  EXPECT_NEAR(tau(0.0, 1), -0.598413, 1e-6);
  EXPECT_DOUBLE_EQ(tau(0.0, 1), -3.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi)));
  for (double z : {0.1, 0.5, 1.3, 2.7, 6.0})
    for (Eigen::Index d : {1, 2, 5}) EXPECT_EQ(tau(z, d), tau(-z, d));
}

TEST(Tau, RootsOfTheQuartic) {
  for (double r : {std::sqrt(3.0 - std::sqrt(6.0)), std::sqrt(3.0 + std::sqrt(6.0))}) {
    EXPECT_NEAR(tau(r, 1), 0.0, 1e-15);
    EXPECT_LT(tau(r - 1e-3, 1) * tau(r + 1e-3, 1), 0.0);
  }
  EXPECT_NEAR(std::sqrt(3.0 - std::sqrt(6.0)), 0.742, 1e-3);
  EXPECT_NEAR(std::sqrt(3.0 + std::sqrt(6.0)), 2.334, 1e-3);
}

TEST(Tau, VanishingMoments) {
  const double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 3; ++k) {
    for (Eigen::Index d : {1, 2}) {
      const double m = gauss_kronrod<double, 61>::integrate([&](double z) { return std::pow(z, k) * tau(z, d); }, -inf,
                                                            inf, 15, 1e-14);
      EXPECT_LE(std::abs(m), 1e-8) << "k=" << k << " d=" << d;
    }
  }
  const double m4 =
      gauss_kronrod<double, 61>::integrate([](double z) { return std::pow(z, 4) * tau(z, 1); }, -inf, inf, 15, 1e-14);
  EXPECT_GT(std::abs(m4), 1.0);
}

TEST(Tau, DecaysBeyondTen) {
  for (double z = 10.0; z < 60.0; z += 0.37) EXPECT_LE(std::abs(tau(z, 1)), 1e-12);
  EXPECT_EQ(tau(kTauSupport + 1.0, 1), 0.0);
}

TEST(RidgeletTransform, LinearInTarget) {
  auto data = grid_dataset("ex1", 101);
  const Vector a{{0.7}};
  const Dataset zero(data.inputs(), Vector::Zero(data.size()), data.bounds());
  EXPECT_EQ(ridgelet_transform(zero, a, 0.3), 0.0);
  const Dataset scaled(data.inputs(), 3.0 * data.targets(), data.bounds());
  EXPECT_NEAR(ridgelet_transform(scaled, a, 0.3), 3.0 * ridgelet_transform(data, a, 0.3), 1e-14);
}

TEST(RidgeletTransform, MatchesDenseQuadrature) {
  const Dataset ones = constant_one(2001);
  const double est = ridgelet_transform(ones, Vector{{1.0}}, 0.0);
  const double exact = gauss_kronrod<double, 61>::integrate([](double z) { return tau(z, 1); }, -1.0, 1.0, 15, 1e-14);
  EXPECT_LE(std::abs(est - exact), 1e-3 * std::abs(exact));
}

TEST(RidgeletOnGrid, ShapeAndValues) {
  auto data = grid_dataset("ex1", 51);
  const auto f = ridgelet_on_grid(data, {Vector{{1.0}}, Vector{{-2.0}}}, {0.0, 0.5, 1.0});
  ASSERT_EQ(f.values.rows(), 2);
  ASSERT_EQ(f.values.cols(), 3);
  EXPECT_EQ(f.values(1, 2), ridgelet_transform(data, Vector{{-2.0}}, 1.0));
}

TEST(CollapsedRidgelet, ZeroTargetAndLinearity) {
  auto data = grid_dataset("ex1", 51);
  const RadialQuadrature q;
  const Direction dir = Direction::normalized(Vector{{0.3, -0.2}});
  const Dataset zero(data.inputs(), Vector::Zero(data.size()), data.bounds());
  EXPECT_EQ(collapsed_ridgelet(zero, dir, q), 0.0);

  Vector g(data.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = std::sin(3 * data.inputs()(i, 0));
  const Dataset gd(data.inputs(), g, data.bounds());
  const Dataset sum(data.inputs(), data.targets() + g, data.bounds());
  const double lhs = collapsed_ridgelet(sum, dir, q);
  const double rhs = collapsed_ridgelet(data, dir, q) + collapsed_ridgelet(gd, dir, q);
  EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(rhs)));
}

TEST(CollapsedRidgelet, InvariantUnderRelabeling) {
  auto data = generate_dataset(find_target("ex3"), 40, 2, Layout::random_uniform);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(data.size()));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Eigen::Index>(perm.size() - 1 - i);
  const Dataset rev = data.subset(perm);
  const RadialQuadrature q;
  for (const auto& dir : golden_spiral(20)) {
    const double a = collapsed_ridgelet(data, dir, q);
    EXPECT_NEAR(a, collapsed_ridgelet(rev, dir, q), 1e-12 * (1 + std::abs(a)));
  }
}

TEST(CollapsedRidgelet, RuleSelfConvergence) {
  auto data = generate_dataset(find_target("ex1"), 50, derive_seed(0, Stream::train), Layout::random_uniform);
  const auto dirs = sample_circle(400, 3, false);
  const auto coarse = collapsed_field(data, dirs, RadialQuadrature{20.0, 200});
  const auto fine = collapsed_field(data, dirs, RadialQuadrature{20.0, 400});
  const double peak = fine.values.cwiseAbs().maxCoeff();
  EXPECT_LE((coarse.values - fine.values).cwiseAbs().maxCoeff(), 0.01 * peak);
}

TEST(CollapsedField, OneValuePerDirectionAndThreadIndependent) {
  auto data = grid_dataset("ex1", 50);
  const auto dirs = sample_circle(300, 1, false);
  const auto one = collapsed_field(data, dirs, {}, 1);
  const auto three = collapsed_field(data, dirs, {}, 3);
  EXPECT_EQ(one.size(), dirs.size());
  EXPECT_EQ(one.values, three.values);
  EXPECT_TRUE(one.values.allFinite());
}

TEST(RadialQuadrature, Validation) {
  EXPECT_THROW((RadialQuadrature{0.0, 10}).validate(), InvalidArgument);
  EXPECT_THROW((RadialQuadrature{1.0, 1}).validate(), InvalidArgument);
  const RadialQuadrature q{2.0, 4};
  EXPECT_DOUBLE_EQ(q.node(3), 2.0);
  EXPECT_DOUBLE_EQ(q.weight(3), 0.25);
  EXPECT_DOUBLE_EQ(q.weight(0), 0.5);
}

namespace {

struct PruneFixture {
  Dataset data = generate_dataset(find_target("ex1"), 30, 5, Layout::random_uniform);
  std::vector<Direction> dirs = sample_circle(200, 6, false);
  Dictionary dict = build_dictionary(data, dirs);
  CollapsedField field = collapsed_field(data, dirs);
};

}  // namespace

TEST(PruneDictionary, ZeroThresholdKeepsNonzeroAtoms) {
  PruneFixture fx;
  const auto pr = prune_dictionary(fx.dict, fx.field, 0.0);
  std::size_t nonzero = 0;
  for (auto s : fx.dict.source_indices()) nonzero += fx.field.values(static_cast<Eigen::Index>(s)) != 0.0;
  EXPECT_EQ(pr.dictionary.size(), nonzero);
  EXPECT_FALSE(pr.degenerate);
}

TEST(PruneDictionary, SubsetKeepsTheMaximumAndIndices) {
  PruneFixture fx;
  const auto pr = prune_dictionary(fx.dict, fx.field, 0.2);
  EXPECT_LT(pr.dictionary.size(), fx.dict.size());
  EXPECT_EQ(pr.considered, fx.dirs.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < fx.dict.size(); ++k) {
    if (std::abs(fx.field.values(static_cast<Eigen::Index>(fx.dict.source_indices()[k]))) >
        std::abs(fx.field.values(static_cast<Eigen::Index>(fx.dict.source_indices()[best]))))
      best = k;
  }
  const auto& kept = pr.dictionary.source_indices();
  EXPECT_NE(std::find(kept.begin(), kept.end(), fx.dict.source_indices()[best]), kept.end());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto& orig = fx.dict.source_indices();
    const auto pos = static_cast<std::size_t>(std::find(orig.begin(), orig.end(), kept[k]) - orig.begin());
    ASSERT_LT(pos, orig.size());
    EXPECT_EQ(pr.dictionary.column(static_cast<Eigen::Index>(k)), fx.dict.column(static_cast<Eigen::Index>(pos)));
  }
}

TEST(PruneDictionary, AtomAlignedFieldAndSingleAtom) {
  PruneFixture fx;
  std::vector<Direction> atom_dirs;
  for (std::size_t k = 0; k < fx.dict.size(); ++k) atom_dirs.push_back(fx.dict.direction(k));
  const auto aligned = collapsed_field(fx.data, atom_dirs);
  EXPECT_EQ(prune_dictionary(fx.dict, aligned, 0.1).dictionary.source_indices(),
            prune_dictionary(fx.dict, fx.field, 0.1).dictionary.source_indices());

  const auto single = fx.dict.select({3});
  const CollapsedField one{{single.direction(0)}, Vector{{-0.25}}, {}};
  EXPECT_EQ(prune_dictionary(single, one, 0.999).dictionary.size(), 1u);
}

TEST(PruneDictionary, ThresholdValidationAndDegenerateField) {
  PruneFixture fx;
  EXPECT_THROW(prune_dictionary(fx.dict, fx.field, 1.0), InvalidArgument);
  EXPECT_THROW(prune_dictionary(fx.dict, fx.field, -0.1), InvalidArgument);
  CollapsedField zero = fx.field;
  zero.values.setZero();
  const auto pr = prune_dictionary(fx.dict, zero, 1e-3);
  EXPECT_TRUE(pr.degenerate);
  EXPECT_EQ(pr.dictionary.size(), fx.dict.size());
  CollapsedField wrong{{fx.dirs[0]}, Vector{{1.0}}, {}};
  EXPECT_THROW(prune_dictionary(fx.dict, wrong, 1e-3), InvalidArgument);
}

TEST(Reconstruction, ZeroFieldAndLinearity) {
  PruneFixture fx;
  CollapsedField zero = fx.field;
  zero.values.setZero();
  EXPECT_EQ(reconstruct_from_crf(Vector{{0.3}}, zero), 0.0);
  CollapsedField twice = fx.field;
  twice.values *= 2.0;
  const double base = reconstruct_from_crf(Vector{{0.3}}, fx.field);
  EXPECT_NEAR(reconstruct_from_crf(Vector{{0.3}}, twice), 2.0 * base, 1e-12 * (1 + std::abs(base)));
  EXPECT_NEAR(sphere_area(1), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(sphere_area(2), 4.0 * std::numbers::pi, 1e-13);
}

TEST(Reconstruction, TracksTheTargetOnExampleOne) {
  const auto train = generate_dataset(find_target("ex1"), 50, derive_seed(0, Stream::train), Layout::random_uniform);
  const auto test = generate_dataset(find_target("ex1"), 1000, 0, Layout::grid);
  const auto field = collapsed_field(train, sample_circle(10000, derive_seed(0, Stream::directions), false));
  Vector rec(test.size());
  for (Eigen::Index i = 0; i < test.size(); ++i) rec(i) = reconstruct_from_crf(test.inputs().row(i), field);
  EXPECT_GE(pearson(rec, test.targets()), 0.8);
}
