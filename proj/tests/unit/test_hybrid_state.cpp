#include <gtest/gtest.h>

#include <cmath>

#include "error_code.hpp"
#include "hybridiq/hybrid_state.hpp"
#include "oracles.hpp"

namespace hybridiq {
namespace {

using oracle::ket;
using oracle::max_abs;
using oracle::projector;
using test_support::code_of;

HybridState two_cell_classical() {
  return HybridState(ClassicalSpace::counting(2), {0.5 * projector(ket(2, 0)), 0.5 * projector(ket(2, 1))});
}

HybridState random_w(std::size_t cells, int qdim, Rng& rng) {
  return random_state(ClassicalSpace::counting(cells), qdim, rng);
}

TEST(Effect, Validation) {
  EXPECT_NO_THROW(Effect(identity(2)));
  EXPECT_NO_THROW(Effect(CMatrix::Zero(2, 2)));
  EXPECT_EQ(code_of([] { Effect(2.0 * identity(2)); }), ErrorCode::BadEffect);
  EXPECT_EQ(code_of([] { Effect(-projector(ket(2, 0))); }), ErrorCode::BadEffect);
  CMatrix skew = identity(2) / 2;
  skew(0, 1) = 0.3;
  EXPECT_EQ(code_of([&] { Effect{skew}; }), ErrorCode::BadEffect);
}

TEST(Event, Construction) {
  const Event e = Event::of(4, {1, 3});
  EXPECT_FALSE(e.contains(0));
  EXPECT_TRUE(e.contains(3));
  EXPECT_EQ(e.complement().cells(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(Event::all(3).cells().size(), 3u);
  EXPECT_TRUE(Event::none(3).cells().empty());
  EXPECT_EQ(code_of([] { Event::of(2, {2}); }), ErrorCode::BadEvent);
}

TEST(NewState, Examples) {
  EXPECT_NO_THROW(HybridState(ClassicalSpace::counting(1), {projector(ket(2, 0))}));
  EXPECT_NO_THROW(two_cell_classical());

  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 0) = 1.01;
  bad(1, 1) = -0.01;
  try {
    HybridState(ClassicalSpace::counting(1), {bad});
    FAIL() << "expected NotPositive";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositive);
    EXPECT_NE(std::string(e.what()).find("cell 0"), std::string::npos) << e.what();
  }
}

TEST(NewState, Normalization) {
  const ClassicalSpace one = ClassicalSpace::counting(1);
  EXPECT_EQ(code_of([&] { HybridState(one, {0.8 * projector(ket(2, 0))}); }), ErrorCode::NotNormalized);
  const HybridState fixed(one, {0.95 * projector(ket(2, 0))}, true);
  EXPECT_NEAR(fixed.total_trace(), 1.0, 1e-15);
  // Renormalization only rescues totals within 0.1 of one.
  EXPECT_EQ(code_of([&] { HybridState(one, {0.8 * projector(ket(2, 0))}, true); }), ErrorCode::NotNormalized);
}

TEST(NewState, ShapeChecks) {
  EXPECT_EQ(code_of([] { HybridState(ClassicalSpace::counting(2), {identity(2) / 2}); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([] { HybridState(ClassicalSpace::counting(2), {identity(2) / 4, identity(3) / 6}); }),
            ErrorCode::ShapeMismatch);
}

TEST(Probability, Examples) {
  Rng rng(41);
  const HybridState w = random_w(5, 3, rng);
  EXPECT_NEAR(probability(w, Event::all(5), Effect::identity(3)), 1.0, 1e-12);

  const HybridState c = two_cell_classical();
  EXPECT_NEAR(probability(c, Event::of(2, {0}), Effect(projector(ket(2, 0)))), 0.5, 1e-15);
  EXPECT_NEAR(probability(c, Event::of(2, {1}), Effect(projector(ket(2, 0)))), 0.0, 1e-15);
}

TEST(Probability, MatchesLoopOracle) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cells = 1 + trial % 7;
    const int q = 1 + trial % 4;
    const HybridState w = random_w(cells, q, rng);
    const std::vector<std::size_t> a = oracle::random_subset(cells, rng);
    const CMatrix e = random_effect(q, rng);
    EXPECT_NEAR(probability(w, Event::of(cells, a), Effect(e)), oracle::loop_probability(w.masses(), a, e), 1e-12);
  }
}

TEST(Probability, RejectsMismatchedInputs) {
  const HybridState c = two_cell_classical();
  EXPECT_EQ(code_of([&] { probability(c, Event::all(3), Effect::identity(2)); }), ErrorCode::BadEvent);
  EXPECT_EQ(code_of([&] { probability(c, Event::all(2), Effect::identity(3)); }), ErrorCode::BadEffect);
}

TEST(Marginals, ProductState) {
  Rng rng(43);
  const ClassicalSpace space({0.5, 2.0, 1.0});
  const std::vector<double> f{0.2, 0.5, 0.3};
  const CMatrix rho = random_density(2, rng);
  const HybridState w = product_state(space, f, rho);
  const ClassicalMarginal cm = classical_marginal(w);
  for (int n = 0; n < 3; ++n) {
    EXPECT_NEAR(cm.masses[n], f[n], 1e-15);
    EXPECT_NEAR(cm.densities[n], f[n] / space.weight(n), 1e-15);
    EXPECT_LE(max_abs(conditional_quantum(w, n) - rho), 1e-12);
  }
  EXPECT_LE(max_abs(quantum_marginal(w) - rho), 1e-15);
}

TEST(Marginals, Examples) {
  EXPECT_LE(max_abs(quantum_marginal(two_cell_classical()) - identity(2) / 2), 0.0);
  const HybridState single(ClassicalSpace::counting(1), {identity(3) / 3});
  EXPECT_EQ(classical_marginal(single).masses, std::vector<double>{1.0});

  Rng rng(44);
  const CMatrix tau = random_density(3, rng);
  const HybridState w(ClassicalSpace::counting(2), {0.3 * tau, 0.7 * identity(3) / 3});
  EXPECT_LE(max_abs(conditional_quantum(w, 0) - tau), 1e-15);
}

TEST(Marginals, RandomStates) {
  Rng rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    const HybridState w = random_w(1 + trial % 6, 1 + trial % 4, rng);
    double total = 0.0;
    for (double p : classical_marginal(w).masses) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (double v : oracle::eigenvalues(quantum_marginal(w))) EXPECT_GE(v, -1e-9);
    for (std::size_t n = 0; n < w.cells(); ++n) {
      if (w.mass(n).trace().real() > 1e-12) EXPECT_NEAR(conditional_quantum(w, n).trace().real(), 1.0, 1e-12);
    }
  }
}

TEST(Marginals, ZeroMassCell) {
  const HybridState w(ClassicalSpace::counting(2), {identity(2) / 2, CMatrix::Zero(2, 2)});
  EXPECT_EQ(code_of([&] { conditional_quantum(w, 1); }), ErrorCode::ZeroMassCell);
}

TEST(Distance, Examples) {
  Rng rng(46);
  const HybridState w = random_w(4, 2, rng);
  EXPECT_EQ(distance(w, w), 0.0);
  const ClassicalSpace one = ClassicalSpace::counting(1);
  EXPECT_NEAR(distance(HybridState(one, {projector(ket(2, 0))}), HybridState(one, {projector(ket(2, 1))})), 2.0, 1e-15);
}

TEST(Distance, MetricProperties) {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cells = 1 + trial % 5;
    const int q = 1 + trial % 3;
    const HybridState a = random_w(cells, q, rng);
    const HybridState b = random_w(cells, q, rng);
    const HybridState c = random_w(cells, q, rng);
    EXPECT_EQ(distance(a, b), distance(b, a));
    EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-10);
    EXPECT_LE(distance(a, b), 2.0 + 1e-12);
    EXPECT_NEAR(trace_norm(embed_quantum(a) - embed_quantum(b)), distance(a, b), 1e-10);
  }
}

TEST(Distance, SpaceMismatch) {
  Rng rng(48);
  const HybridState a = random_w(2, 2, rng);
  EXPECT_EQ(code_of([&] { distance(a, random_w(3, 2, rng)); }), ErrorCode::SpaceMismatch);
  EXPECT_EQ(code_of([&] { distance(a, random_w(2, 3, rng)); }), ErrorCode::SpaceMismatch);
  const HybridState weighted = random_state(ClassicalSpace({1.0, 2.0}), 2, rng);
  EXPECT_EQ(code_of([&] { distance(a, weighted); }), ErrorCode::SpaceMismatch);
}

TEST(ProductState, Examples) {
  const ClassicalSpace two = ClassicalSpace::counting(2);
  const HybridState uniform = product_state(two, {0.5, 0.5}, identity(2) / 2);
  EXPECT_EQ(uniform.mass(0), uniform.mass(1));

  Rng rng(49);
  const CMatrix rho = random_density(3, rng);
  const HybridState point = product_state(two, {1.0, 0.0}, rho);
  EXPECT_LE(max_abs(point.mass(0) - rho), 1e-15);
  EXPECT_EQ(max_abs(point.mass(1)), 0.0);

  EXPECT_EQ(code_of([&] { product_state(two, {0.7, 0.7}, rho); }), ErrorCode::NotAState);
  EXPECT_EQ(code_of([&] { product_state(two, {0.5, 0.5}, identity(2)); }), ErrorCode::NotAState);
  EXPECT_EQ(code_of([&] { product_state(two, {1.5, -0.5}, rho); }), ErrorCode::NotAState);
}

TEST(TensorWithQuantum, Examples) {
  Rng rng(50);
  const HybridState w = random_w(3, 2, rng);
  const CMatrix scalar = CMatrix::Ones(1, 1);
  EXPECT_EQ(oracle::max_abs_diff(tensor_with_quantum(w, scalar).masses(), w.masses()), 0.0);

  const CMatrix rq = random_density(3, rng);
  const HybridState big = tensor_with_quantum(w, rq);
  EXPECT_EQ(big.qdim(), 6);
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_LE(max_abs(oracle::loop_partial_trace(big.mass(n), 2, 3, 1) - w.mass(n)), 1e-15);
  }
  const Event a = Event::of(3, {0, 2});
  const CMatrix e = random_effect(2, rng);
  EXPECT_NEAR(probability(big, a, Effect(kron(e, identity(3)))), probability(w, a, Effect(e)), 1e-12);
  EXPECT_EQ(code_of([&] { tensor_with_quantum(w, 2.0 * rq); }), ErrorCode::NotAState);
}

TEST(ConditionOnEffect, IdentityAndProduct) {
  Rng rng(51);
  const HybridState v = random_w(3, 2, rng);
  const CMatrix rq = random_density(3, rng);
  const HybridState w = tensor_with_quantum(v, rq);

  const Conditioned trivial = condition_on_effect(w, Effect::identity(3));
  EXPECT_NEAR(trivial.probability, 1.0, 1e-12);
  EXPECT_LE(oracle::max_abs_diff(trivial.state.masses(), v.masses()), 1e-12);

  const CMatrix f = random_effect(3, rng);
  const Conditioned c = condition_on_effect(w, Effect(f));
  EXPECT_NEAR(c.probability, (rq * f).trace().real(), 1e-12);
  EXPECT_LE(oracle::max_abs_diff(c.state.masses(), v.masses()), 1e-10);
}

TEST(ConditionOnEffect, MatchesJointProbability) {
  Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cells = 1 + trial % 5;
    const int d = 1 + trial % 3;
    const int dq = 1 + (trial / 3) % 3;
    const HybridState w = random_w(cells, d * dq, rng);
    const CMatrix f = random_effect(dq, rng);
    const CMatrix e = random_effect(d, rng);
    const std::vector<std::size_t> a = oracle::random_subset(cells, rng);
    const Conditioned c = condition_on_effect(w, Effect(f));
    const double lhs = probability(c.state, Event::of(cells, a), Effect(e)) * c.probability;
    const double rhs = oracle::loop_probability(w.masses(), a, oracle::loop_kron(e, f));
    EXPECT_NEAR(lhs, rhs, 1e-10);
  }
}

TEST(ConditionOnEffect, Errors) {
  const HybridState w(ClassicalSpace::counting(1), {kron(identity(2) / 2, projector(ket(2, 0)))});
  EXPECT_EQ(code_of([&] { condition_on_effect(w, Effect(projector(ket(2, 1)))); }), ErrorCode::ZeroProbability);
  EXPECT_EQ(code_of([&] { condition_on_effect(w, Effect::identity(3)); }), ErrorCode::DimensionMismatch);
}

TEST(EmbedQuantum, Examples) {
  Rng rng(53);
  const CMatrix rho = random_density(2, rng);
  const HybridState single(ClassicalSpace::counting(1), {rho});
  EXPECT_EQ(embed_quantum(single), rho);

  const std::vector<double> f{0.1, 0.6, 0.3};
  const HybridState prod = product_state(ClassicalSpace::counting(3), f, rho);
  CMatrix diag_f = CMatrix::Zero(3, 3);
  for (int n = 0; n < 3; ++n) diag_f(n, n) = f[n];
  EXPECT_LE(max_abs(embed_quantum(prod) - oracle::loop_kron(rho, diag_f)), 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const HybridState w = random_w(1 + trial % 5, 1 + trial % 3, rng);
    const CMatrix hat = embed_quantum(w);
    EXPECT_LE(max_abs(oracle::loop_partial_trace(hat, w.qdim(), static_cast<int>(w.cells()), 1) - quantum_marginal(w)),
              1e-12);
    EXPECT_NEAR(hat.trace().real(), 1.0, 1e-12);
    EXPECT_TRUE(is_psd(hat, 1e-9));
  }
}

TEST(Mix, PerCellConvexCombination) {
  Rng rng(54);
  const HybridState a = random_w(3, 2, rng);
  const HybridState b = random_w(3, 2, rng);
  const HybridState m = mix(0.25, a, b);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_LE(max_abs(m.mass(n) - (0.25 * a.mass(n) + 0.75 * b.mass(n))), 1e-15);
  EXPECT_EQ(code_of([&] { mix(1.5, a, b); }), ErrorCode::BadRange);
}

TEST(RandomState, DeterminismAndValidity) {
  const ClassicalSpace space = discretize_interval(0.0, 1.0, 5);
  const HybridState a = random_state(space, 3, 99);
  const HybridState b = random_state(space, 3, 99);
  EXPECT_EQ(oracle::max_abs_diff(a.masses(), b.masses()), 0.0);
  EXPECT_GT(distance(a, random_state(space, 3, 100)), 0.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const HybridState w = random_state(space, 1 + static_cast<int>(seed % 4), seed);
    EXPECT_TRUE(check_state(w.masses()).ok);
  }
}

TEST(CheckState, ReportsFailures) {
  const StateCheck ok = check_state({identity(2) / 2});
  EXPECT_TRUE(ok.ok);
  const StateCheck low = check_state({0.4 * identity(2)});
  EXPECT_FALSE(low.ok);
  EXPECT_EQ(*low.failure, ErrorCode::NotNormalized);
  EXPECT_NEAR(low.total_trace, 0.8, 1e-15);
}

}  // namespace
}  // namespace hybridiq
