#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "macrolight/errors.hpp"
#include "macrolight/witnesses.hpp"

using namespace macrolight;

namespace {

constexpr double kPi = std::numbers::pi;

OptimizeOptions no_refine() {
  OptimizeOptions o;
  o.refine = false;
  return o;
}

}  // namespace

TEST(Bhattacharyya, Bounds) {
  const std::array<double, 2> a{0.9, 0.1}, b{0.1, 0.9}, x{1.0, 0.0}, y{0.0, 1.0};
  EXPECT_NEAR(bhattacharyya(a, a), 1.0, 1e-15);
  EXPECT_NEAR(bhattacharyya(a, b), 0.6, 1e-15);
  EXPECT_EQ(bhattacharyya(x, y), 0.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    std::array<double, 4> p{}, q{};
    double sp = 0, sq = 0;
    for (int k = 0; k < 4; ++k) {
      p[k] = u(rng);
      q[k] = k == i % 4 ? 0.0 : u(rng);
      sp += p[k];
      sq += q[k];
    }
    for (int k = 0; k < 4; ++k) {
      p[k] /= sp;
      q[k] /= sq;
    }
    const double v = bhattacharyya(p, q);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
    EXPECT_NEAR(bhattacharyya(p, p), 1.0, 1e-12);
  }
}

TEST(Normalize, EmptyThrows) {
  const std::array<SignedLog, 2> zeros{};
  EXPECT_THROW(normalize(zeros), EmptyPostSelection);
  const std::array<SignedLog, 2> tiny{SignedLog::from_log(-5000), SignedLog::from_log(-5000 + std::log(3.0L))};
  const auto p = normalize(tiny);
  EXPECT_NEAR(p[0], 0.25, 1e-14);
  EXPECT_NEAR(p[1], 0.75, 1e-14);
}

TEST(Correlation, ClosedFormSingleSharpPhoton) {
  const Scheme s = Scheme::sharp(1);
  EventEvaluator ev(s, {1, 1}, 0.3);
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double p = i * kPi / 10, q = j * kPi / 10;
      ASSERT_NEAR(correlation(ev.two(p, q)), -std::cos(2 * (p + q)), 1e-10);
    }
  }
  EXPECT_NEAR(correlation(0.1, kPi / 4 - 0.1, s, {1, 1}, 0.5), 0.0, 1e-12);
}

TEST(Correlation, PolarizedInputAlignedAnalyzers) {
  for (const Scheme& s : {Scheme::sharp(1), Scheme::sharp(2), Scheme::fair(3), Scheme::blurred(2, 4)}) {
    EXPECT_NEAR(correlation(0.0, 0.0, s, {12, 0}, 0.4), 1.0, 1e-14) << s.render();
  }
  EXPECT_THROW(correlation(0.3, 0.4, Scheme::sharp(2), {3, 0}, 0.4), EmptyPostSelection);
}

TEST(LgiK, Examples) {
  EXPECT_NEAR(lgi_k(0.0, kPi / 2, 0.0, Scheme::sharp(1), {1, 1}, 0.2), 3.0, 1e-12);
  EventEvaluator ev(Scheme::fair(3), {7, 5}, 0.35);
  for (double th : {0.0, 0.4, 2.0}) {
    EXPECT_NEAR(lgi_k(ev, th, th, th), correlation(ev.two(th, th)), 1e-14);
    EXPECT_LE(lgi_k(ev, th, th, th), 1.0);
  }
}

TEST(LgiK, FrozenReference) {
  EXPECT_NEAR(lgi_k(0.25, 0.79, 1.32, Scheme::sharp(2), {12, 2}, 0.1), 1.2015699606496278866, 1e-12);
  EXPECT_NEAR(lgi_k(0.1, 1.4, 2.2, Scheme::fair(2), {9, 2}, 0.3), -0.19017524727249617551, 1e-12);
  EXPECT_NEAR(lgi_k(0.3, 0.9, 2.8, Scheme::blurred(2, 3), {10, 2}, 0.4), -0.7161622566643776207, 1e-12);
}

TEST(LgiK, PolarizedInputNeverViolates) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(0, kPi);
  for (int n : {6, 15, 40}) {
    EventEvaluator ev(Scheme::sharp(2), {n, 0}, 0.3);
    for (int i = 0; i < 200; ++i) {
      try {
        EXPECT_LE(lgi_k(ev, ang(rng), ang(rng), ang(rng)), 1.0 + 1e-9);
      } catch (const EmptyPostSelection&) {
      }
    }
  }
}

TEST(LgiK, PiPeriodic) {
  EventEvaluator ev(Scheme::blurred(2, 4), {20, 4}, 0.3);
  const double base = lgi_k(ev, 0.3, 1.2, 2.5);
  EXPECT_NEAR(lgi_k(ev, 0.3 + kPi, 1.2, 2.5), base, 1e-12);
  EXPECT_NEAR(lgi_k(ev, 0.3, 1.2 - kPi, 2.5), base, 1e-12);
  EXPECT_NEAR(lgi_k(ev, 0.3, 1.2, 2.5 + 2 * kPi), base, 1e-12);
}

TEST(SharpReflectivity, WitnessesIndependentOfR) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0, kPi);
  const Scheme s = Scheme::sharp(2);
  EventEvaluator a(s, {12, 2}, 0.05), b(s, {12, 2}, 0.3), c(s, {12, 2}, 0.7);
  for (int i = 0; i < 20; ++i) {
    const double t1 = ang(rng), t2 = ang(rng), t3 = ang(rng);
    const double k = lgi_k(a, t1, t2, t3);
    EXPECT_NEAR(lgi_k(b, t1, t2, t3), k, 1e-9);
    EXPECT_NEAR(lgi_k(c, t1, t2, t3), k, 1e-9);
    const double v2 = v12_at(a, t1, t2), v3 = v123_at(a, t1, t2, t3);
    EXPECT_NEAR(v12_at(b, t1, t2), v2, 1e-9);
    EXPECT_NEAR(v12_at(c, t1, t2), v2, 1e-9);
    EXPECT_NEAR(v123_at(b, t1, t2, t3), v3, 1e-9);
    EXPECT_NEAR(v123_at(c, t1, t2, t3), v3, 1e-9);
  }
}

TEST(Kmax, SinglePhotonPairIsMaximal) {
  for (double r : {0.1, 0.5, 0.9}) {
    const auto rep = kmax(Scheme::sharp(1), {1, 1}, r);
    EXPECT_NEAR(rep.value, 3.0, 1e-6) << r;
    ASSERT_EQ(rep.angles.size(), 3u);
    EXPECT_NEAR(lgi_k(rep.angles[0], rep.angles[1], rep.angles[2], Scheme::sharp(1), {1, 1}, r), rep.value,
                1e-12);
  }
}

TEST(Kmax, SharpTwoRegion) {
  for (int n : {6, 10, 25, 50}) EXPECT_LE(kmax(Scheme::sharp(2), {n, 0}, 0.2).value, 1.0 + 1e-9) << n;
  EXPECT_GT(kmax(Scheme::sharp(2), {12, 2}, 0.2).value, 1.0);
}

TEST(Kmax, ExchangeSymmetry) {
  EXPECT_NEAR(kmax(Scheme::sharp(2), {12, 2}, 0.2).value, kmax(Scheme::sharp(2), {2, 12}, 0.2).value, 1e-8);
  EXPECT_NEAR(kmax(Scheme::fair(2), {9, 3}, 0.3).value, kmax(Scheme::fair(2), {3, 9}, 0.3).value, 1e-8);
  EXPECT_NEAR(kmax(Scheme::blurred(2, 3), {14, 3}, 0.4).value,
              kmax(Scheme::blurred(2, 3), {3, 14}, 0.4).value, 1e-8);
}

TEST(Kmax, RefinementDominatesGrid) {
  for (FockInput in : {FockInput{12, 2}, FockInput{7, 3}, FockInput{30, 5}}) {
    const auto grid = kmax(Scheme::sharp(2), in, 0.2, no_refine());
    const auto refined = kmax(Scheme::sharp(2), in, 0.2);
    EXPECT_FALSE(grid.refined);
    EXPECT_TRUE(refined.refined);
    EXPECT_GE(refined.value, grid.value);
  }
  const auto grid = v12(Scheme::sharp(2), {3, 1}, 0.2, no_refine());
  const auto refined = v12(Scheme::sharp(2), {3, 1}, 0.2);
  EXPECT_LE(refined.value, grid.value);
}

TEST(Kmax, Deterministic) {
  const auto a = kmax(Scheme::fair(2), {9, 2}, 0.3);
  const auto b = kmax(Scheme::fair(2), {9, 2}, 0.3);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.angles, b.angles);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Kmax, EmptyPostSelection) {
  EXPECT_THROW(kmax(Scheme::sharp(2), {2, 0}, 0.3), EmptyPostSelection);
  AngleGrid coarse{4};
  EXPECT_THROW(coarse.validate(), ConfigError);
}

TEST(Nsit, Distributions) {
  for (double t2 : {0.0, 0.7, 2.1}) {
    const auto [p, q] = nsit_dists_two(1.1, t2, Scheme::sharp(1), {1, 1}, 0.4);
    EXPECT_NEAR(p[0], 0.5, 1e-14);
    EXPECT_NEAR(q[0], 0.5, 1e-14);
  }
  const auto [p, q] = nsit_dists_two(0.6, 0.0, Scheme::fair(2), {9, 0}, 0.4);
  EXPECT_NEAR(p[0], 1.0, 1e-14);
  const auto [a, b] = nsit_dists_two(0.4, 1.1, Scheme::sharp(2), {3, 1}, 0.2);
  EXPECT_GT(std::fabs(a[0] - b[0]), 1e-3);
}

TEST(Nsit, FrozenReference) {
  EventEvaluator s31(Scheme::sharp(2), {3, 1}, 0.2);
  EXPECT_NEAR(v12_at(s31, 0.4, 1.1), 0.95067570073934096322, 1e-12);
  EventEvaluator s53(Scheme::sharp(2), {5, 3}, 0.2);
  EXPECT_NEAR(v123_at(s53, 0.4, 1.1, 2.0), 0.99207283160410675481, 1e-12);
  EventEvaluator f62(Scheme::fair(2), {6, 2}, 0.5);
  EXPECT_NEAR(v123_at(f62, 0.3, 1.0, 2.6), 0.99990659955462989921, 1e-12);
}

TEST(Nsit, SpecialCases) {
  EXPECT_NEAR(v12(Scheme::sharp(1), {1, 1}, 0.3).value, 1.0, 1e-9);
  EXPECT_NEAR(v12(Scheme::sharp(2), {5, 5}, 0.3).value, 1.0, 1e-9);
  EXPECT_NEAR(v12(Scheme::sharp(2), {7, 0}, 0.3).value, 1.0, 1e-9);
  EXPECT_LT(v12(Scheme::sharp(2), {3, 1}, 0.3).value, 1.0 - 1e-6);
  EXPECT_NEAR(v123(Scheme::sharp(2), {6, 0}, 0.3).value, 1.0, 1e-9);
  EXPECT_LT(v123(Scheme::sharp(2), {3, 3}, 0.3).value, 1.0 - 1e-6);
}

TEST(Nsit, NotEnoughPhotons) {
  EXPECT_THROW(v123(Scheme::sharp(1), {1, 1}, 0.3), NotEnoughPhotons);
  EXPECT_THROW(v12(Scheme::sharp(3), {2, 2}, 0.3), NotEnoughPhotons);
  EXPECT_THROW(v123(Scheme::blurred(2, 4), {3, 2}, 0.3), NotEnoughPhotons);
}

TEST(CriticalSearch, BracketsTheCrossing) {
  EXPECT_EQ(sixth_of(5000), 833);
  EXPECT_EQ(sixth_of(9), 2);
  const Scheme s = Scheme::blurred(2, 4);
  const auto cs = find_critical_n(s, 0.2, {}, 90, 200);
  ASSERT_TRUE(cs.n_c.has_value());
  ASSERT_TRUE(cs.last_violating.has_value());
  EXPECT_EQ(*cs.last_violating + 1, *cs.n_c);
  EXPECT_LE(kmax(s, {*cs.n_c, sixth_of(*cs.n_c)}, 0.2).value, 1.0 + kViolationMargin);
  EXPECT_GT(kmax(s, {*cs.last_violating, sixth_of(*cs.last_violating)}, 0.2).value, 1.0 + kViolationMargin);
  EXPECT_FALSE(cs.samples.empty());
  const auto none = find_critical_n(Scheme::sharp(3), 0.2, {}, 12, 40);
  EXPECT_FALSE(none.n_c.has_value());
  EXPECT_THROW(find_critical_n(s, 0.2, {}, 10, 5), ConfigError);
}
