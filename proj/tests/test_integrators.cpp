#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

using namespace kgsym;

namespace {

double rel_diff(const StateU& a, const StateU& b) { return oracle::max_abs_diff(a, b) / std::max(oracle::max_abs(b), 1e-300); }

StateU sine_gordon_state(const Grid& g) {
  const int n = g.half_points();
  std::vector<double> u(2 * n), v(2 * n);
  for (int j = -n; j < n; ++j) {
    const double x = g.point(j);
    u[j + n] = std::cos(x) + 0.5 * std::sin(2 * x);
    v[j + n] = 0.3 * std::cos(x) - 0.2 * std::sin(3 * x);
  }
  return StateU(to_spectral(g, u), to_spectral(g, v));
}

StateU exact_linear(const StateU& w, double t) { return apply(Operator::exp_tau, PropagatorTable(w.grid(), t), w); }

}  // namespace

TEST(ZeroNonlinearity, EveryStepIsTheFreeFlow) {
  std::mt19937_64 rng(1);
  const Grid g(16);
  const auto nl = zero_nonlinearity();
  const auto prev = oracle::random_state(g, rng), curr = oracle::random_state(g, rng);
  const PropagatorTable t(g, 0.13);
  const auto e1 = apply(Operator::exp_tau, t, curr);
  const auto e2 = apply(Operator::exp_2tau, t, prev);
  EXPECT_LE(oracle::max_abs_diff(step_lri1(curr, t, nl), e1), 1e-15);
  EXPECT_LE(oracle::max_abs_diff(step_lri2(curr, t, nl), e1), 1e-15);
  EXPECT_LE(oracle::max_abs_diff(step_slri1({prev, curr, 1, 0.13}, t, nl).curr, e2), 1e-15);
  EXPECT_LE(oracle::max_abs_diff(step_slri2({prev, curr, 1, 0.13}, t, nl).curr, e2), 1e-15);
}

TEST(ZeroNonlinearity, EvolveMatchesExactPropagator) {
  std::mt19937_64 rng(2);
  const Grid g(32);
  const auto w0 = oracle::random_state(g, rng);
  for (auto s : {Scheme::lri1, Scheme::slri1, Scheme::lri2, Scheme::slri2}) {
    const auto out = evolve(w0, s, 0.01, 300, zero_nonlinearity());
    EXPECT_LE(oracle::max_abs_diff(out.state, exact_linear(w0, 3.0)), 1e-11) << scheme_name(s);
  }
}

TEST(Steps, ZeroStepIsIdentity) {
  std::mt19937_64 rng(3);
  const Grid g(16);
  const auto w = oracle::random_state(g, rng, 0.5);
  const PropagatorTable t(g, 0.0);
  EXPECT_EQ(step_lri1(w, t, sine_nonlinearity()), w);
  EXPECT_EQ(step_lri2(w, t, sine_nonlinearity()), w);
}

TEST(Steps, GridMismatch) {
  const PropagatorTable t(Grid(8), 0.1);
  EXPECT_THROW(step_lri1(StateU(Grid(16)), t, sine_nonlinearity()), DimensionError);
  EXPECT_THROW(step_slri2({StateU(Grid(16)), StateU(Grid(16)), 1, 0.1}, t, sine_nonlinearity()), DimensionError);
}

TEST(Steps, LieStepAgainstRungeKutta) {
  const Grid g(8);
  const auto w = sine_gordon_state(g);
  const double tau = 1e-3;
  const auto step = step_lri1(w, PropagatorTable(g, tau), sine_nonlinearity());
  const auto ref = oracle::rk4_flow(w, tau, 16, [](double u) { return std::sin(u); });
  EXPECT_LE(oracle::max_abs_diff(step, ref), 5e-6);
}

TEST(Symmetry, Slri1TimeReversalIdentity) {
  std::mt19937_64 rng(4);
  const Grid g(32);
  const auto nl = sine_nonlinearity();
  for (double tau : {0.1, -0.01}) {
    const auto prev = oracle::smooth_random_state(g, rng, 1.0, 1.5);
    const auto curr = oracle::smooth_random_state(g, rng, 1.0, 1.5);
    const PropagatorTable t(g, tau);
    const auto next = step_slri1({prev, curr, 1, tau}, t, nl).curr;
    const auto recovered = apply(Operator::exp_2tau, PropagatorTable(g, -tau), next) -
                           (2 * tau) * apply(Operator::exp_neg_tau, t, eval_F(curr, nl));
    EXPECT_LE(rel_diff(recovered, prev), 1e-12);
  }
}

// Exchange test: stepping (U^{n+1}, U^n) with -tau returns U^{n-1}.
TEST(Symmetry, ExchangeTest) {
  std::mt19937_64 rng(5);
  const Grid g(32);
  const auto nl = sine_nonlinearity();
  for (auto s : {Scheme::slri1, Scheme::slri2}) {
    for (double tau : {0.1, -0.1, 0.01, -0.01}) {
      const PropagatorTable fwd(g, tau), bwd(g, -tau);
      for (int i = 0; i < 10; ++i) {
        const auto prev = oracle::smooth_random_state(g, rng, 1.0, 1.5);
        const auto curr = oracle::smooth_random_state(g, rng, 1.0, 1.5);
        const auto next = two_step(s, {prev, curr, 1, tau}, fwd, nl).curr;
        const auto back = two_step(s, {next, curr, 1, -tau}, bwd, nl).curr;
        EXPECT_LE(rel_diff(back, prev), 1e-12) << scheme_name(s) << " tau=" << tau;
      }
    }
  }
}

TEST(Symmetrize, LieCorrectionGivesSlri1) {
  std::mt19937_64 rng(6);
  const Grid g(32);
  const auto nl = sine_nonlinearity();
  for (double tau : {0.1, -0.05}) {
    const auto sym = symmetrize(lri1_scheme(), g, tau);
    const PropagatorTable t(g, tau);
    for (int i = 0; i < 10; ++i) {
      const auto prev = oracle::smooth_random_state(g, rng, 1.0, 1.5);
      const auto curr = oracle::smooth_random_state(g, rng, 1.0, 1.5);
      EXPECT_LE(rel_diff(sym.step({prev, curr, 1, tau}, nl).curr, step_slri1({prev, curr, 1, tau}, t, nl).curr), 1e-12);
      EXPECT_LE(rel_diff(sym.start(curr, nl), step_lri1(curr, t, nl)), 1e-12);
    }
  }
}

TEST(Symmetrize, CorrectedLieGivesSlri2) {
  std::mt19937_64 rng(7);
  const Grid g(32);
  const auto nl = sine_nonlinearity();
  for (double tau : {0.1, -0.05}) {
    const auto sym = symmetrize(lri2_scheme(), g, tau);
    const PropagatorTable t(g, tau);
    for (int i = 0; i < 10; ++i) {
      const auto prev = oracle::smooth_random_state(g, rng, 1.0, 1.5);
      const auto curr = oracle::smooth_random_state(g, rng, 1.0, 1.5);
      EXPECT_LE(rel_diff(sym.step({prev, curr, 1, tau}, nl).curr, step_slri2({prev, curr, 1, tau}, t, nl).curr), 1e-12);
      EXPECT_LE(rel_diff(sym.start(curr, nl), step_lri2(curr, t, nl)), 1e-12);
    }
  }
}

TEST(Symmetrize, ZeroCorrectionIsTwoStepPropagator) {
  std::mt19937_64 rng(8);
  const Grid g(16);
  const auto sym = symmetrize(free_flow_scheme(), g, 0.2);
  const auto prev = oracle::random_state(g, rng), curr = oracle::random_state(g, rng);
  const auto expected = apply(Operator::exp_2tau, PropagatorTable(g, 0.2), prev);
  EXPECT_LE(oracle::max_abs_diff(sym.step({prev, curr, 1, 0.2}, sine_nonlinearity()).curr, expected), 1e-15);
}

TEST(Symmetrize, BeginCountsOneStep) {
  const Grid g(8);
  const auto sym = symmetrize(lri1_scheme(), g, 0.1);
  const auto ts = sym.begin(sine_gordon_state(g), sine_nonlinearity());
  EXPECT_EQ(ts.step_index, 1);
  EXPECT_EQ(sym.step(ts, sine_nonlinearity()).step_index, 2);
}

TEST(Evolve, FirstStepOfSymmetricSchemes) {
  const Grid g(16);
  const auto w = sine_gordon_state(g);
  const auto nl = sine_nonlinearity();
  const PropagatorTable t(g, 0.05);
  EXPECT_EQ(evolve(w, Scheme::slri1, 0.05, 1, nl).state, step_lri1(w, t, nl));
  EXPECT_EQ(evolve(w, Scheme::slri2, 0.05, 1, nl).state, step_lri2(w, t, nl));
}

TEST(Evolve, ZeroStepsEchoesInitialState) {
  const Grid g(8);
  const auto w = sine_gordon_state(g);
  const auto out = evolve(w, Scheme::slri2, 0.1, 0, sine_nonlinearity());
  EXPECT_EQ(out.state, w);
  EXPECT_EQ(out.steps, 0);
}

TEST(Evolve, ObserverStride) {
  const Grid g(8);
  std::vector<std::int64_t> seen;
  EvolveOptions opts;
  opts.stride = 3;
  opts.observer = [&](std::int64_t n, double, const StateU&) { seen.push_back(n); };
  evolve(sine_gordon_state(g), Scheme::lri2, 0.1, 10, sine_nonlinearity(), opts);
  EXPECT_EQ(seen, (std::vector<std::int64_t>{0, 3, 6, 9}));
}

TEST(Evolve, RejectsBadArguments) {
  const Grid g(8);
  EXPECT_THROW(evolve(StateU(g), Scheme::lri1, 0.1, -1, sine_nonlinearity()), ParameterError);
  EvolveOptions opts;
  opts.stride = 0;
  EXPECT_THROW(evolve(StateU(g), Scheme::lri1, 0.1, 1, sine_nonlinearity(), opts), ParameterError);
}

TEST(Evolve, BlowUpNamesTheStep) {
  const Grid g(16);
  std::mt19937_64 rng(9);
  auto w = oracle::random_state(g, rng, 20.0);
  try {
    evolve(w, Scheme::lri1, 0.5, 100, cubic_nonlinearity());
    FAIL() << "expected a blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_LE(e.step(), 100);
  }
}

TEST(Evolve, SymmetricSchemesRunBackwards) {
  const Grid g(16);
  std::mt19937_64 rng(10);
  const auto w0 = oracle::smooth_random_state(g, rng, 0.5, 2.0);
  const auto nl = sine_nonlinearity();
  const double tau = 0.05;
  const int n = 40;
  for (auto s : {Scheme::slri1, Scheme::slri2}) {
    const auto fwd = evolve(w0, s, tau, n, nl);
    TwoStepState ts{fwd.state, *fwd.previous, 1, -tau};
    const PropagatorTable back(g, -tau);
    for (int i = 0; i < n - 1; ++i) ts = two_step(s, ts, back, nl);
    EXPECT_LE(rel_diff(ts.curr, w0), 1e-9) << scheme_name(s);
  }
}

TEST(Consistency, DifferenceQuotientTendsToVectorField) {
  const Grid g(16);
  const auto w = sine_gordon_state(g);
  const auto nl = sine_nonlinearity();
  // L U + F(U) = (v, -l^2 u + f(u))
  StateU field = eval_F(w, nl);
  for (int l = -16; l < 16; ++l) {
    field.u(l) = w.v(l);
    field.v(l) -= static_cast<double>(l) * l * w.u(l);
  }
  for (auto s : {Scheme::lri1, Scheme::lri2}) {
    const auto quotient = [&](double tau) { return (1.0 / tau) * (starting_step(s, w, PropagatorTable(g, tau), nl) - w); };
    const auto coarse = quotient(1e-6), fine = quotient(1e-7);
    const auto extrapolated = (10.0 / 9.0) * fine - (1.0 / 9.0) * coarse;
    EXPECT_LE(rel_diff(extrapolated, field), 1e-7) << scheme_name(s);
    EXPECT_LE(rel_diff(fine, field), 1e-5) << scheme_name(s);
  }
}

TEST(LocalOrder, StartingStepDefects) {
  const Grid g(8);
  const auto w = sine_gordon_state(g);
  const auto nl = sine_nonlinearity();
  const auto f = [](double u) { return std::sin(u); };
  const auto defect = [&](Scheme s, double tau) {
    const auto ref = oracle::rk4_flow(w, tau, 16, f);
    return state_norm(evolve(w, s, tau, 1, nl).state - ref, 1.0, false);
  };
  EXPECT_NEAR(defect(Scheme::lri1, 1e-3) / defect(Scheme::lri1, 5e-4), 4.0, 0.6);
  EXPECT_NEAR(defect(Scheme::lri2, 1e-3) / defect(Scheme::lri2, 5e-4), 8.0, 1.6);
}

// With the exact window (U(t - tau), U(t)) both symmetric updates are third-order
// accurate on smooth data.
TEST(LocalOrder, TwoStepDefectsOnSmoothData) {
  const Grid g(8);
  const auto w = sine_gordon_state(g);
  const auto nl = sine_nonlinearity();
  const auto f = [](double u) { return std::sin(u); };
  for (auto s : {Scheme::slri1, Scheme::slri2}) {
    const auto defect = [&](double tau) {
      const auto now = oracle::rk4_flow(w, tau, 16, f);
      const auto next = oracle::rk4_flow(w, 2 * tau, 32, f);
      const auto step = two_step(s, {w, now, 1, tau}, PropagatorTable(g, tau), nl).curr;
      return state_norm(step - next, 1.0, false);
    };
    EXPECT_NEAR(defect(1e-3) / defect(5e-4), 8.0, 1.6) << scheme_name(s);
  }
}

TEST(GlobalOrder, SmoothDataAtNEight) {
  const Grid g(8);
  const auto w = sine_gordon_state(g);
  const auto nl = sine_nonlinearity();
  const auto ref = oracle::rk4_flow(w, 1.0, 4000, [](double u) { return std::sin(u); });
  const std::vector<double> taus{0.05, 0.025, 0.0125};
  for (auto [s, factor] : {std::pair{Scheme::lri1, 2.0}, std::pair{Scheme::slri1, 4.0}, std::pair{Scheme::lri2, 4.0},
                           std::pair{Scheme::slri2, 4.0}}) {
    std::vector<double> errs;
    for (double tau : taus) errs.push_back(err_metric(evolve(w, s, tau, std::lround(1.0 / tau), nl).state, ref));
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      EXPECT_NEAR(errs[i] / errs[i + 1], factor, 0.2 * factor) << scheme_name(s);
    }
  }
}

TEST(Schemes, NamesRoundTrip) {
  for (auto s : {Scheme::lri1, Scheme::slri1, Scheme::lri2, Scheme::slri2}) EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_THROW(parse_scheme("rk4"), ConfigError);
  EXPECT_TRUE(is_two_step(Scheme::slri1));
  EXPECT_FALSE(is_two_step(Scheme::lri2));
  EXPECT_THROW(two_step(Scheme::lri1, {StateU(Grid(8)), StateU(Grid(8)), 1, 0.1}, PropagatorTable(Grid(8), 0.1),
                        sine_nonlinearity()),
               ParameterError);
}
