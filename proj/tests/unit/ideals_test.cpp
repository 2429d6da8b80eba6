#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "coarse/error.hpp"
#include "coarse/ideals.hpp"
#include "coarse/localization.hpp"
#include "support.hpp"

namespace coarse {
namespace {

PointId at(const SpacePtr& s, std::int64_t x) { return *s->find(make_coord({x})); }

std::vector<double> range(double from, double to, double step = 1.0) {
  std::vector<double> out;
  for (double v = from; v <= to; v += step) out.push_back(v);
  return out;
}

BandKernel central_block(const SpacePtr& s, std::int64_t half) {
  KernelBuilder b(s, 2 * half);
  for (std::int64_t x = -half; x <= half; ++x)
    for (std::int64_t y = -half; y <= half; ++y) b.add(at(s, x), at(s, y), 1.0 / (1.0 + std::abs(x - y)));
  return std::move(b).build();
}

TEST(Ghost, CompactBlock) {
  auto s = build_lattice_window(1, 30);
  const std::vector<double> radii{1, 2};
  auto rep = ghost_report(central_block(s, 3), radii, 1e-12);
  EXPECT_TRUE(rep.verdict);
  for (const auto& c : rep.curves) EXPECT_EQ(c.final_value(), 0.0);
}

TEST(Ghost, IdentityNeverDecays) {
  auto s = build_lattice_window(2, 6);
  const std::vector<double> radii{1};
  auto rep = ghost_report(identity_kernel(s), radii, 0.5);
  EXPECT_FALSE(rep.verdict);
  for (const auto& [h, v] : rep.curves[0].points) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Ghost, CurvesAreNonincreasing) {
  std::mt19937_64 rng(13);
  auto s = build_lattice_window(1, 40);
  auto k = testing::random_kernel(s, rng);
  const std::vector<double> radii{0, 1, 3};
  auto rep = ghost_report(k, radii, 0.1);
  for (const auto& c : rep.curves)
    for (std::size_t i = 1; i < c.points.size(); ++i) EXPECT_LE(c.points[i].second, c.points[i - 1].second);
}

TEST(Hls, SingleBlock) {
  const std::vector<int> sizes{1};
  auto pi = build_hls(sizes);
  EXPECT_EQ(pi.space()->size(), 1u);
  auto check = verify_hls(pi);
  EXPECT_TRUE(check.ok());
  EXPECT_DOUBLE_EQ(check.trace, 1.0);
  EXPECT_EQ(check.rank, 1u);
}

TEST(Hls, TwoBlocks) {
  const std::vector<int> sizes{1, 2};
  auto pi = build_hls(sizes);
  const auto b0 = pi.block(0), b1 = pi.block(1);
  ASSERT_EQ(b0.size(), 1u);
  ASSERT_EQ(b1.size(), 4u);
  EXPECT_DOUBLE_EQ(pi.kernel().at(b0[0], b0[0]).real(), 1.0);
  for (auto x : b1)
    for (auto y : b1) EXPECT_DOUBLE_EQ(pi.kernel().at(x, y).real(), 0.25);
  EXPECT_EQ(pi.kernel().at(b0[0], b1[0]), Complex(0.0));
  auto check = verify_hls(pi);
  EXPECT_NEAR(check.trace, 2.0, 1e-12);
  EXPECT_EQ(check.rank, 2u);
  EXPECT_TRUE(check.block_diagonal);
}

TEST(Hls, GhostVerdictDependsOnTolerance) {
  const std::vector<int> sizes{2, 3, 4};
  auto pi = build_hls(sizes);
  const std::vector<double> radii{1};
  EXPECT_TRUE(ghost_report(pi.kernel(), radii, 0.6).verdict);
  EXPECT_FALSE(ghost_report(pi.kernel(), radii, 0.2).verdict);
}

TEST(Hls, ProfileIsBallCountOverSize) {
  std::vector<int> sizes(8);
  std::iota(sizes.begin(), sizes.end(), 1);
  auto pi = build_hls(sizes);
  for (double r : {0.0, 1.0, 2.0}) {
    auto prof = local_norm_profile(pi.kernel(), r);
    for (std::size_t n = 0; n < sizes.size(); ++n) {
      for (auto x : pi.block(n)) {
        std::size_t inside = 0;
        for (auto y : pi.space()->ball(x, r)) inside += pi.component_of(y) == n;
        EXPECT_NEAR(prof[x], std::sqrt(static_cast<double>(inside)) / sizes[n], 1e-12);
      }
    }
  }
}

TEST(Hls, Rejections) {
  const std::vector<int> decreasing{3, 2};
  EXPECT_THROW(build_hls(decreasing), InvalidInput);
  const std::vector<int> empty;
  EXPECT_THROW(build_hls(empty), InvalidInput);
  const std::vector<int> zero{0, 1};
  EXPECT_THROW(build_hls(zero), InvalidInput);
}

TEST(Defect, DisjointSupport) {
  auto s = build_lattice_window(1, 30);
  std::vector<char> rows(s->size(), 0);
  for (std::int64_t x = -5; x <= 5; ++x) rows[at(s, x)] = 1;
  auto t = restrict_rows(adjacency_kernel(s), rows);
  auto rep = jxi_defect(t, FilterSpec::obstacle({make_coord({0})}), range(0, 10));
  for (std::size_t i = 0; i < rep.scales.size(); ++i)
    if (rep.scales[i] >= 6) {
      EXPECT_EQ(rep.left[i], 0.0);
    }
  EXPECT_EQ(rep.left_defect, 0.0);
}

TEST(Defect, IdentityIsOne) {
  auto s = build_lattice_window(1, 20);
  for (const auto& f : {FilterSpec::frechet(), FilterSpec::half_space({1.0}), FilterSpec::obstacle({make_coord({3})})}) {
    auto rep = jxi_defect(identity_kernel(s), f, range(0, 8, 2));
    EXPECT_NEAR(rep.left_defect, 1.0, 1e-10) << f.name();
    EXPECT_NEAR(rep.right_defect, 1.0, 1e-10) << f.name();
  }
}

TEST(Defect, DecayingRows) {
  auto s = build_lattice_window(1, 60);
  auto t = left_multiply([&](PointId x) { return Complex(1.0 / (1.0 + std::abs(s->coord(x)[0]))); },
                         adjacency_kernel(s));
  auto rep = jxi_defect(t, FilterSpec::frechet(), range(0, 40, 5));
  for (std::size_t i = 0; i < rep.scales.size(); ++i) EXPECT_LE(rep.left[i], 2.0 / (1.0 + rep.scales[i]) + 1e-12);
}

TEST(Defect, ProxyRejectedAndHorizonExhausted) {
  auto s = build_lattice_window(1, 10);
  EXPECT_THROW(jxi_defect(identity_kernel(s), FilterSpec::direction_proxy({make_coord({1}), 1}), range(0, 3)),
               InvalidInput);
  const std::vector<double> far{50, 60};
  EXPECT_THROW(jxi_defect(identity_kernel(s), FilterSpec::frechet(), far), Obstruction);
}

TEST(BallCriterion, LeftSupportedAlongPlusProxy) {
  auto s = build_lattice_window(1, 60);
  std::vector<char> rows(s->size(), 0);
  for (std::int64_t x = -60; x < 0; ++x) rows[at(s, x)] = 1;
  auto t = restrict_cols(restrict_rows(adjacency_kernel(s), rows), rows);
  const std::vector<double> radii{1, 2};
  const auto tails = range(5, 30, 5);
  auto plus = FilterSpec::direction_proxy({make_coord({1}), 1});
  EXPECT_TRUE(localization_ball_criterion(t, plus, radii, tails, 1e-3).verdict);
  auto minus = FilterSpec::direction_proxy({make_coord({-1}), 1});
  EXPECT_FALSE(localization_ball_criterion(t, minus, radii, tails, 1e-3).verdict);
  EXPECT_FALSE(localization_ball_criterion(identity_kernel(s), plus, radii, tails, 1e-3).verdict);
}

TEST(BallCriterion, StepMinusRightLimit) {
  AsymptoticOperatorSpec step;
  step.bands = {{make_coord({0}), Coefficient::step(2.0, 5.0)},
                {make_coord({1}), Coefficient::constant(-1.0)},
                {make_coord({-1}), Coefficient::constant(-1.0)}};
  const DirectionProxy plus{make_coord({1}), 1};
  auto window = build_lattice_window(1, 80);
  auto limit = limit_operator(step, plus);
  auto diff = add(materialize(step, window), materialize(limit, window), -1.0);
  const std::vector<double> radii{1, 3};
  auto crit = localization_ball_criterion(diff, FilterSpec::direction_proxy(plus), radii, range(10, 40, 10), 1e-12);
  EXPECT_TRUE(crit.verdict);
  for (double v : crit.tail_sup) EXPECT_EQ(v, 0.0);
}

TEST(EntryCriterion, Examples) {
  std::vector<int> sizes(10);
  std::iota(sizes.begin(), sizes.end(), 1);
  auto pi = build_hls(sizes);
  auto crit = discrete_entry_criterion(pi.kernel(), FilterSpec::frechet(), range(0, 400, 10));
  EXPECT_NEAR(crit.value, 1.0 / 100.0, 1e-15);

  auto s = build_lattice_window(1, 40);
  EXPECT_DOUBLE_EQ(discrete_entry_criterion(identity_kernel(s), FilterSpec::frechet(), range(0, 30, 10)).value, 1.0);

  auto t = left_multiply([&](PointId x) { return Complex(1.0 / (1.0 + std::abs(s->coord(x)[0]))); },
                         adjacency_kernel(s));
  auto decay = discrete_entry_criterion(t, FilterSpec::frechet(), range(0, 30, 5));
  // the generator at scale h is |x| > h, so the largest entry sits at |x| = h + 1
  for (std::size_t i = 0; i < decay.scales.size(); ++i) EXPECT_NEAR(decay.sups[i], 1.0 / (2.0 + decay.scales[i]), 1e-15);
}

TEST(EntryCriterion, NeedsCountingMeasure) {
  auto base = build_lattice_window(1, 4);
  auto s = base->with_weights(std::vector<double>(base->size(), 2.0));
  EXPECT_THROW(discrete_entry_criterion(identity_kernel(s), FilterSpec::frechet(), range(0, 2)), InvalidInput);
}

TEST(Factorization, CubicDecay) {
  auto s = build_lattice_window(1, 400);
  auto t = left_multiply([&](PointId x) { return Complex(std::pow(1.0 + std::abs(s->coord(x)[0]), -3.0)); },
                         adjacency_kernel(s));
  auto f = factor_through_ideal(t, FilterSpec::frechet(), range(0, 300), 3);
  EXPECT_TRUE(f.complete());
  EXPECT_LE(f.residual, 1e-10);
  EXPECT_TRUE(f.phi_bound_holds);
  for (std::size_t n = 0; n < f.chosen_defects.size(); ++n)
    EXPECT_LE(f.chosen_defects[n], 1.0 / static_cast<double>((n + 1) * (n + 1)));
}

TEST(Factorization, ZeroOperator) {
  auto s = build_lattice_window(1, 30);
  auto f = factor_through_ideal(BandKernel(s, 1), FilterSpec::frechet(), range(0, 20), 2);
  EXPECT_EQ(f.factor.nonzeros(), 0u);
  EXPECT_EQ(f.residual, 0.0);
}

TEST(Factorization, SingleCutoffOnCompactSupport) {
  auto s = build_lattice_window(1, 30);
  auto t = central_block(s, 4);
  auto f = factor_through_ideal(t, FilterSpec::frechet(), range(0, 20), 1);
  EXPECT_TRUE(f.complete());
  EXPECT_EQ(f.residual, 0.0);
  for (PointId x = 0; x < s->size(); ++x) EXPECT_DOUBLE_EQ(f.phi[x], 1.0 / (1.0 + f.theta[x]));
}

TEST(Factorization, PartialWhenWindowRunsOut) {
  auto s = build_lattice_window(1, 20);
  auto t = left_multiply([&](PointId x) { return Complex(std::pow(1.0 + std::abs(s->coord(x)[0]), -1.0)); },
                         adjacency_kernel(s));
  auto f = factor_through_ideal(t, FilterSpec::frechet(), range(0, 19), 50);
  EXPECT_FALSE(f.complete());
  EXPECT_GE(f.achieved_depth, 1u);
  EXPECT_LE(f.residual, 1e-10);
  // defect 2 misses even the first target 1/1
  EXPECT_THROW(factor_through_ideal(scale(identity_kernel(s), 2.0), FilterSpec::frechet(), range(0, 19), 2), Obstruction);
}

}  // namespace
}  // namespace coarse
