#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "pageflip/policy.hpp"

namespace pageflip {
namespace {

// Two equal systems; frac_page = 0.5 * (system + frac_in_system).
PageLayout two_systems() {
  PageLayout l;
  l.width = 1000;
  l.height = 600;
  l.systems = {{0, 100, 220, 0, 1000, false, 10}, {1, 350, 470, 0, 1000, false, 10}};
  return l;
}

ReadingPosition pos_at(int system, double frac_in_system, double t = 0.0) {
  return {0, system, 1000 * frac_in_system, frac_in_system, 0.5 * (system + frac_in_system), t};
}

ReadingPosition pos_from_page_frac(double frac_page, double t) {
  const int system = frac_page < 0.5 ? 0 : 1;
  return {0, system, 0, 2 * frac_page - system, frac_page, t};
}

// Ordinary least squares via the normal equations, independent of the
// centred formulation used by the library.
double ols_slope(const std::vector<TimedFraction>& pts) {
  double n = 0, st = 0, sf = 0, stt = 0, stf = 0;
  for (const auto& p : pts) {
    n += 1;
    st += p.t;
    sf += p.frac_page;
    stt += p.t * p.t;
    stf += p.t * p.frac_page;
  }
  return (n * stf - st * sf) / (n * stt - st * st);
}

TEST(Halfway, BelowHalfHolds) {
  const PageLayout l = two_systems();
  const PolicyStep r = halfway_step({}, pos_at(1, 0.49), l, PolicyConfig{});
  EXPECT_FALSE(r.decision.is_turn());
  EXPECT_EQ(r.state.streak, 0);
}

TEST(Halfway, TurnsOnThirdConsecutiveInRegionAccept) {
  const PageLayout l = two_systems();
  PolicyState s;
  for (int i = 0; i < 2; ++i) {
    PolicyStep r = halfway_step(s, pos_at(1, 0.55, i), l, PolicyConfig{});
    EXPECT_FALSE(r.decision.is_turn());
    s = r.state;
  }
  const PolicyStep r = halfway_step(s, pos_at(1, 0.55, 2), l, PolicyConfig{});
  ASSERT_TRUE(r.decision.is_turn());
  EXPECT_DOUBLE_EQ(r.decision.trigger->t, 2);
  EXPECT_TRUE(r.state.turned);
}

TEST(Halfway, NonLastSystemNeverTurns) {
  const PageLayout l = two_systems();
  PolicyState s;
  for (int i = 0; i < 10; ++i) {
    PolicyStep r = halfway_step(s, pos_at(0, 0.9, i), l, PolicyConfig{});
    EXPECT_FALSE(r.decision.is_turn());
    s = r.state;
  }
}

TEST(Halfway, StreakResetsOnExit) {
  const PageLayout l = two_systems();
  PolicyState s;
  s = halfway_step(s, pos_at(1, 0.6), l, PolicyConfig{}).state;
  s = halfway_step(s, pos_at(1, 0.7), l, PolicyConfig{}).state;
  s = halfway_step(s, pos_at(1, 0.3), l, PolicyConfig{}).state;
  EXPECT_EQ(s.streak, 0);
  s = halfway_step(s, pos_at(1, 0.6), l, PolicyConfig{}).state;
  EXPECT_FALSE(halfway_step(s, pos_at(1, 0.6), l, PolicyConfig{}).decision.is_turn());
}

TEST(Halfway, LiteralRuleWithConfirmCountOne) {
  PolicyConfig cfg;
  cfg.confirm_count = 1;
  EXPECT_TRUE(halfway_step({}, pos_at(1, 0.5), two_systems(), cfg).decision.is_turn());
}

TEST(Halfway, TurnsAtMostOnce) {
  const PageLayout l = two_systems();
  PolicyState s;
  int turns = 0;
  for (int i = 0; i < 50; ++i) {
    PolicyStep r = halfway_step(s, pos_at(1, 0.5 + 0.01 * i), l, PolicyConfig{});
    turns += r.decision.is_turn();
    s = r.state;
  }
  EXPECT_EQ(turns, 1);
}

TEST(TempoEstimate, ExactLine) {
  std::vector<TimedFraction> h;
  for (int i = 0; i < 10; ++i) h.push_back({0.25 * i, 0.1 * 0.25 * i});
  const auto v = tempo_estimate(h, PolicyConfig{});
  ASSERT_TRUE(v);
  EXPECT_NEAR(*v, 0.1, 1e-12);
}

TEST(TempoEstimate, TooFewSamples) {
  std::vector<TimedFraction> h{{0, 0}, {0.1, 0.01}, {0.2, 0.02}, {0.3, 0.03}};
  EXPECT_FALSE(tempo_estimate(h, PolicyConfig{}));
}

TEST(TempoEstimate, NoisySlopeMatchesNormalEquations) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 0.005);
  std::vector<TimedFraction> h;
  for (int i = 0; i < 60; ++i) {
    const double t = i * 0.05;
    h.push_back({t, 0.08 * t + noise(rng)});
  }
  const auto v = tempo_estimate(h, PolicyConfig{});
  ASSERT_TRUE(v);
  EXPECT_GE(*v, 0.06);
  EXPECT_LE(*v, 0.10);
  EXPECT_NEAR(*v, ols_slope(h), 1e-9);
}

TEST(TempoEstimate, OnlyTrailingWindowCounts) {
  std::vector<TimedFraction> h;
  for (int i = 0; i < 20; ++i) h.push_back({0.5 * i, 0.0});    // stalled, t = 0 .. 9.5
  for (int i = 0; i < 10; ++i) h.push_back({10.0 + 0.25 * i, 0.05 * 0.25 * i});
  PolicyConfig cfg;
  cfg.window_sec = 2.5;  // only the moving tail
  ASSERT_TRUE(tempo_estimate(h, cfg));
  EXPECT_NEAR(*tempo_estimate(h, cfg), 0.05, 1e-12);
}

TEST(TempoEstimate, StalledIsNone) {
  std::vector<TimedFraction> h;
  for (int i = 0; i < 10; ++i) h.push_back({0.1 * i, 0.4});
  EXPECT_FALSE(tempo_estimate(h, PolicyConfig{}));
  h.clear();
  for (int i = 0; i < 10; ++i) h.push_back({0.1 * i, 0.4 - 0.001 * i});
  EXPECT_FALSE(tempo_estimate(h, PolicyConfig{}));
}

// Feeds frac_page = 0.1 t at 10 Hz up to (and including) t_end.
PolicyStep feed_constant_tempo(double t_end, const PolicyConfig& cfg) {
  const PageLayout l = two_systems();
  PolicyState s;
  PolicyStep last{};
  for (int i = 0; i * 0.1 <= t_end + 1e-9; ++i) {
    const double t = i * 0.1;
    last = tempo_step(s, pos_from_page_frac(0.1 * t, t), l, cfg);
    s = last.state;
    if (last.decision.is_turn()) break;
  }
  return last;
}

TEST(TempoStep, EtaAboveLeadHolds) {
  // frac 0.85, v 0.1 -> ETA 1.5 s
  const PolicyStep r = feed_constant_tempo(8.5, PolicyConfig{});
  EXPECT_FALSE(r.decision.is_turn());
}

TEST(TempoStep, EtaWithinLeadTurns) {
  // ETA reaches 1.0 s at frac 0.9 (t = 9.0); by frac 0.91 it has fired, at
  // t = 9.0 or, if rounding puts ETA a hair above 1.0, one tick later.
  const PolicyStep r = feed_constant_tempo(9.1, PolicyConfig{});
  ASSERT_TRUE(r.decision.is_turn());
  EXPECT_GE(r.decision.trigger->t, 9.0 - 1e-9);
  EXPECT_LE(r.decision.trigger->t, 9.1 + 1e-9);
  EXPECT_TRUE(r.state.turned);
}

TEST(TempoStep, NoVelocityHolds) {
  const PageLayout l = two_systems();
  PolicyState s;
  for (int i = 0; i < 20; ++i) {
    PolicyStep r = tempo_step(s, pos_at(1, 0.99, 0.1 * i), l, PolicyConfig{});
    EXPECT_FALSE(r.decision.is_turn());
    s = r.state;
  }
}

TEST(TempoStep, RequiresLastSystem) {
  // Very fast reader still in system 0: ETA tiny but no turn.
  const PageLayout l = two_systems();
  PolicyState s;
  for (int i = 0; i < 10; ++i) {
    const double t = 0.1 * i;
    PolicyStep r = tempo_step(s, pos_at(0, 0.1 * i, t), l, PolicyConfig{});
    EXPECT_FALSE(r.decision.is_turn());
    s = r.state;
  }
}

TEST(TempoStep, HistoryStaysWithinWindowAndIncreasing) {
  const PageLayout l = two_systems();
  PolicyConfig cfg;
  PolicyState s;
  for (int i = 0; i < 100; ++i) {
    s = tempo_step(s, pos_at(0, 0.001 * i, 0.1 * i), l, cfg).state;
    s = tempo_step(s, pos_at(0, 0.001 * i, 0.1 * i), l, cfg).state;  // duplicate t
  }
  ASSERT_FALSE(s.history.empty());
  EXPECT_GE(s.history.front().t, s.history.back().t - cfg.window_sec);
  for (std::size_t i = 1; i < s.history.size(); ++i) {
    EXPECT_GT(s.history[i].t, s.history[i - 1].t);
  }
}

TEST(PolicyConfig, Validation) {
  PolicyConfig c;
  c.turn_fraction = 0;
  EXPECT_THROW(c.validate(), BadConfig);
  c = {};
  c.confirm_count = 0;
  EXPECT_THROW(c.validate(), BadConfig);
  c = {};
  c.lead_time_sec = 0;
  EXPECT_THROW(c.validate(), BadConfig);
  EXPECT_EQ(parse_policy_kind("tempo"), PolicyKind::Tempo);
  EXPECT_THROW(parse_policy_kind("eop"), BadConfig);
}

// Trigger time on a noiseless constant-speed reader is monotone in the
// policy knobs.
TEST(PolicyProperties, TriggerTimeMonotoneInKnobs) {
  const PageLayout l = two_systems();
  auto trigger = [&](const PolicyConfig& cfg) {
    PolicyState s;
    for (int i = 0; i <= 1000; ++i) {
      const double t = 0.01 * i;  // 10 s page
      PolicyStep r = policy_step(s, pos_from_page_frac(t / 10.0, t), l, cfg);
      if (r.decision.is_turn()) return t;
      s = r.state;
    }
    return 1e9;
  };
  double prev = -1;
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    PolicyConfig cfg;
    cfg.turn_fraction = f;
    const double t = trigger(cfg);
    EXPECT_GE(t, prev) << "turn_fraction " << f;
    prev = t;
  }
  prev = 1e10;
  for (double lead : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    PolicyConfig cfg;
    cfg.kind = PolicyKind::Tempo;
    cfg.lead_time_sec = lead;
    const double t = trigger(cfg);
    EXPECT_LE(t, prev) << "lead " << lead;
    prev = t;
  }
}

}  // namespace
}  // namespace pageflip
