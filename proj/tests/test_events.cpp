#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "macrolight/errors.hpp"
#include "macrolight/events.hpp"
#include "macrolight/oracle.hpp"

using namespace macrolight;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr EventLabel X = EventLabel::X;
constexpr EventLabel Y = EventLabel::Y;

EventLabel flip(EventLabel a) { return a == X ? Y : X; }

// Event probability by brute-force enumeration through the dense oracle.
double oracle_event(const Scheme& s, FockInput in, double r, const std::vector<double>& thetas,
                    const std::vector<EventLabel>& labels) {
  const auto acc = accepted_outcomes(s, in.total());
  double total = 0;
  if (acc.empty()) return total;
  std::vector<std::size_t> idx(thetas.size(), 0);
  while (true) {
    std::vector<std::pair<PortConfig, Outcome>> ports;
    bool match = true;
    int photons = 0;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      const auto& [w, lab] = acc[idx[k]];
      match = match && lab == labels[k];
      photons += w.total();
      ports.push_back({{thetas[k], r}, w});
    }
    if (match && photons <= in.total()) total += oracle::oracle_sequence(in, ports);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == acc.size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return total;
}

}  // namespace

TEST(Scheme, ParseAndRender) {
  EXPECT_EQ(Scheme::parse("s2"), Scheme::sharp(2));
  EXPECT_EQ(Scheme::parse("f4"), Scheme::fair(4));
  EXPECT_EQ(Scheme::parse("f4"), Scheme::blurred(1, 4));
  EXPECT_EQ(Scheme::parse("b2-4"), Scheme::blurred(2, 4));
  for (const char* text : {"s1", "s3", "f2", "b2-4", "b3-3"}) {
    EXPECT_EQ(Scheme::parse(Scheme::parse(text).render()), Scheme::parse(text)) << text;
  }
  for (const Scheme& s : {Scheme::sharp(5), Scheme::fair(3), Scheme::blurred(2, 7)}) {
    EXPECT_EQ(Scheme::parse(s.render()), s);
  }
  EXPECT_EQ(Scheme::fair(4).render(), "f4");
  EXPECT_EQ(Scheme::blurred(2, 4).render(), "b2-4");
}

TEST(Scheme, RejectsBadText) {
  for (const char* text : {"", "x2", "s0", "s", "b4-2", "b0-2", "b2", "f0", "s2x", "b2-", "-1"}) {
    EXPECT_THROW(Scheme::parse(text), ConfigError) << text;
  }
  try {
    Scheme::parse("q7");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("q7"), std::string::npos);
  }
  EXPECT_THROW(Scheme::sharp(0), ConfigError);
  EXPECT_THROW(Scheme::blurred(3, 2), ConfigError);
}

TEST(Classify, Examples) {
  EXPECT_EQ(classify({2, 0}, Scheme::sharp(2)), X);
  EXPECT_EQ(classify({0, 2}, Scheme::sharp(2)), Y);
  EXPECT_FALSE(classify({2, 1}, Scheme::sharp(2)));
  for (const Scheme& s : {Scheme::sharp(1), Scheme::fair(4), Scheme::blurred(1, 1), Scheme::blurred(2, 4)}) {
    EXPECT_FALSE(classify({1, 1}, s));
    EXPECT_FALSE(classify({0, 0}, s));
  }
  EXPECT_FALSE(classify({3, 1}, Scheme::blurred(2, 4)));
  EXPECT_EQ(classify({3, 2}, Scheme::blurred(2, 4)), X);
  EXPECT_EQ(classify({0, 4}, Scheme::blurred(2, 4)), Y);
  EXPECT_FALSE(classify({5, 0}, Scheme::blurred(2, 4)));
  EXPECT_EQ(classify({1, 0}, Scheme::fair(2)), X);
  EXPECT_EQ(classify({1, 2}, Scheme::fair(2)), Y);
}

TEST(Classify, SharpEqualsDegenerateBlurred) {
  for (int w = 1; w <= 4; ++w) {
    for (int x = 0; x <= 8; ++x) {
      for (int y = 0; y <= 8; ++y) {
        ASSERT_EQ(classify({x, y}, Scheme::sharp(w)), classify({x, y}, Scheme::blurred(w, w)))
            << w << " " << x << "," << y;
      }
    }
  }
}

TEST(AcceptedOutcomes, EnumerationBound) {
  for (const Scheme& s : {Scheme::sharp(3), Scheme::fair(4), Scheme::blurred(2, 4)}) {
    for (int max_total : {0, 1, 3, 6, 20}) {
      for (const auto& [w, lab] : accepted_outcomes(s, max_total)) {
        EXPECT_LE(w.total(), max_total);
        EXPECT_EQ(classify(w, s), lab);
      }
    }
  }
  EXPECT_EQ(accepted_outcomes(Scheme::fair(2), 10).size(), 6u);
  EXPECT_EQ(accepted_outcomes(Scheme::blurred(2, 4), 100).size(), 12u);
  EXPECT_TRUE(accepted_outcomes(Scheme::sharp(3), 2).empty());
}

TEST(EventProbs, ClosedForms) {
  const double r = 0.4, t2 = 1 - r * r;
  const Scheme s1 = Scheme::sharp(1);
  for (double th : {0.0, 0.5, 1.9}) {
    EXPECT_NEAR(event_prob_one(X, s1, {1, 1}, {th, r}), t2 * r * r, 1e-15);
    EXPECT_NEAR(event_prob_one(Y, s1, {1, 1}, {th, r}), t2 * r * r, 1e-15);
    EXPECT_NEAR(event_prob_one(X, s1, {1, 0}, {th, r}), r * r * std::pow(std::cos(th), 2), 1e-15);
    EXPECT_NEAR(event_prob_one(Y, s1, {1, 0}, {th, r}), r * r * std::pow(std::sin(th), 2), 1e-15);
  }
  const double a = 0.3, b = 1.0, c = 2.2;
  const std::array<PortConfig, 2> two{PortConfig{a, r}, PortConfig{b, r}};
  EXPECT_NEAR(event_prob_two(X, X, s1, {1, 1}, two), t2 * std::pow(r, 4) * std::pow(std::sin(a + b), 2), 1e-15);
  EXPECT_NEAR(event_prob_two(X, Y, s1, {1, 1}, two), t2 * std::pow(r, 4) * std::pow(std::cos(a + b), 2), 1e-15);
  const std::array<PortConfig, 3> three{PortConfig{a, r}, PortConfig{b, r}, PortConfig{c, r}};
  for (EventLabel l1 : {X, Y}) {
    for (EventLabel l2 : {X, Y}) {
      for (EventLabel l3 : {X, Y}) EXPECT_EQ(event_prob_three(l1, l2, l3, s1, {1, 1}, three), 0.0);
    }
  }
  const double k = 6 * std::pow(t2, 3) * std::pow(r, 6);
  EXPECT_NEAR(event_prob_three(X, X, X, s1, {3, 0}, three),
              k * std::pow(std::cos(a) * std::cos(b) * std::cos(c), 2), 1e-15);
  EXPECT_NEAR(event_prob_three(Y, Y, Y, s1, {3, 0}, three),
              k * std::pow(std::sin(a) * std::sin(b) * std::sin(c), 2), 1e-15);
}

TEST(EventProbs, SharpMatchesDegenerateBlurred) {
  const double r = 0.6;
  for (int w = 1; w <= 3; ++w) {
    const Scheme s = Scheme::sharp(w), b = Scheme::blurred(w, w);
    for (int n = 0; n <= 8; ++n) {
      for (int m = 0; n + m <= 8; ++m) {
        const FockInput in{n, m};
        const std::array<PortConfig, 3> p{PortConfig{0.3, r}, PortConfig{1.3, r}, PortConfig{2.1, r}};
        for (EventLabel x : {X, Y}) {
          ASSERT_EQ(event_prob_one(x, s, in, p[0]), event_prob_one(x, b, in, p[0]));
          for (EventLabel y : {X, Y}) {
            ASSERT_EQ(event_prob_two(x, y, s, in, {p[0], p[1]}), event_prob_two(x, y, b, in, {p[0], p[1]}));
            for (EventLabel z : {X, Y}) {
              ASSERT_EQ(event_prob_three(x, y, z, s, in, p), event_prob_three(x, y, z, b, in, p));
            }
          }
        }
      }
    }
  }
}

TEST(EventProbs, MonotoneAcceptance) {
  const FockInput in{9, 4};
  const std::array<PortConfig, 2> p{PortConfig{0.7, 0.5}, PortConfig{2.0, 0.5}};
  double previous = 0;
  for (int hi = 1; hi <= 5; ++hi) {
    const Scheme s = Scheme::fair(hi);
    double total = 0;
    for (EventLabel a : {X, Y}) {
      for (EventLabel b : {X, Y}) total += event_prob_two(a, b, s, in, p);
    }
    EXPECT_GE(total, previous - 1e-15) << hi;
    previous = total;
  }
}

TEST(EventProbs, BlurredMatchesOracleEnumeration) {
  const Scheme s = Scheme::fair(2);
  const double r = 0.55;
  for (EventLabel a : {X, Y}) {
    for (EventLabel b : {X, Y}) {
      const double lib = event_prob_two(a, b, s, {2, 2}, {PortConfig{0.4, r}, PortConfig{1.7, r}});
      EXPECT_NEAR(lib, oracle_event(s, {2, 2}, r, {0.4, 1.7}, {a, b}), 1e-12);
    }
  }
}

TEST(EventProbs, LabelSymmetryAgainstOracle) {
  const double r = 0.5;
  const std::vector<double> th{0.3, 1.1, 2.4};
  for (const Scheme& s : {Scheme::sharp(1), Scheme::fair(2), Scheme::blurred(2, 3)}) {
    for (int n = 0; n <= 6; ++n) {
      for (int m = 0; n + m <= 6; ++m) {
        const std::vector<double> mirrored{-th[0], -th[1], -th[2]};
        for (EventLabel a : {X, Y}) {
          for (EventLabel b : {X, Y}) {
            const double lib = event_prob_two(a, b, s, {n, m}, {PortConfig{th[0], r}, PortConfig{th[1], r}});
            const double ora = oracle_event(s, {m, n}, r, {mirrored[0], mirrored[1]}, {flip(a), flip(b)});
            ASSERT_NEAR(lib, ora, 1e-10) << s.render() << " " << n << "," << m;
          }
        }
        if (n + m > 4) continue;
        for (EventLabel a : {X, Y}) {
          for (EventLabel b : {X, Y}) {
            for (EventLabel c : {X, Y}) {
              const double lib = event_prob_three(a, b, c, s, {n, m},
                                                  {PortConfig{th[0], r}, PortConfig{th[1], r}, PortConfig{th[2], r}});
              const double ora = oracle_event(s, {m, n}, r, mirrored, {flip(a), flip(b), flip(c)});
              ASSERT_NEAR(lib, ora, 1e-10);
            }
          }
        }
      }
    }
  }
}

TEST(EventEvaluator, MatchesReferenceAggregation) {
  for (const Scheme& s : {Scheme::sharp(2), Scheme::fair(3), Scheme::blurred(2, 4)}) {
    const FockInput in{11, 4};
    const double r = 0.35;
    EventEvaluator ev(s, in, r);
    const auto one = ev.one(0.8);
    const auto two = ev.two(0.8, 2.1);
    const auto three = ev.three(0.8, 2.1, 0.2);
    const std::array<PortConfig, 3> p{PortConfig{0.8, r}, PortConfig{2.1, r}, PortConfig{0.2, r}};
    for (EventLabel a : {X, Y}) {
      EXPECT_NEAR(one[event_index(a)].to_double(), event_prob_one(a, s, in, p[0]), 1e-14);
      for (EventLabel b : {X, Y}) {
        EXPECT_NEAR(two[event_index(a, b)].to_double(), event_prob_two(a, b, s, in, {p[0], p[1]}), 1e-14);
        for (EventLabel c : {X, Y}) {
          EXPECT_NEAR(three[event_index(a, b, c)].to_double(), event_prob_three(a, b, c, s, in, p), 1e-14);
        }
      }
    }
    const std::vector<double> last{0.0, 0.2, 1.5};
    const auto row2 = ev.two_row(0.8, last);
    const auto row3 = ev.three_row(0.8, 2.1, last);
    for (std::size_t i = 0; i < last.size(); ++i) {
      const auto d2 = ev.two(0.8, last[i]);
      const auto d3 = ev.three(0.8, 2.1, last[i]);
      for (int k = 0; k < 4; ++k) EXPECT_NEAR(row2[i][k].to_double(), d2[k].to_double(), 1e-16);
      for (int k = 0; k < 8; ++k) EXPECT_NEAR(row3[i][k].to_double(), d3[k].to_double(), 1e-16);
    }
  }
}
