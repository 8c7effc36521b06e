#include "hybridiq/properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "hybridiq/correlations.hpp"
#include "hybridiq/error.hpp"
#include "hybridiq/hybrid_channel.hpp"
#include "hybridiq/hybrid_state.hpp"
#include "hybridiq/locc.hpp"
#include "hybridiq/random.hpp"

namespace hybridiq {

void PropertyResult::record(double deviation) {
  ++checks;
  if (!(deviation <= tolerance)) ++violations;
  if (std::isnan(deviation)) {
    max_deviation = deviation;
  } else if (!std::isnan(max_deviation)) {
    max_deviation = std::max(max_deviation, deviation);
  }
}

bool SuiteReport::passed() const { return violations() == 0; }

std::size_t SuiteReport::violations() const {
  std::size_t total = 0;
  for (const PropertyResult& p : properties) total += p.violations;
  return total;
}

namespace {

ClassicalSpace random_space(Rng& rng, int max_cells) {
  const int cells = rng.uniform_int(1, max_cells);
  std::vector<double> weights(static_cast<std::size_t>(cells));
  for (double& w : weights) w = rng.uniform(0.1, 2.0);
  return ClassicalSpace(std::move(weights));
}

HybridState varied_state(const ClassicalSpace& space, int qdim, Rng& rng) {
  RandomStateOptions options;
  options.rank = rng.uniform() < 0.3 ? rng.uniform_int(1, qdim) : 0;
  options.empty_cell_chance = rng.uniform() < 0.3 ? 0.3 : 0.0;
  return random_state(space, qdim, rng, options);
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double block_gap(const HybridState& a, const HybridState& b) {
  double gap = 0.0;
  for (std::size_t n = 0; n < a.cells(); ++n) gap = std::max(gap, max_abs(a.mass(n) - b.mass(n)));
  return gap;
}

double positivity_excess(const HybridState& w) {
  double worst = 0.0;
  for (const CMatrix& sigma : w.masses()) worst = std::max(worst, -min_eigenvalue(sigma));
  return worst;
}

// Trials share a table of named properties; trial t of property p draws from
// Rng(seed).split(p).split(t).
class Suite {
 public:
  Suite(std::string name, std::size_t trials, std::uint64_t seed) {
    report_.suite = std::move(name);
    report_.trials = trials;
    report_.seed = seed;
  }

  PropertyResult& property(const std::string& name, double tolerance) {
    for (PropertyResult& p : report_.properties)
      if (p.name == name) return p;
    report_.properties.push_back(PropertyResult{name, tolerance, 0, 0, 0.0});
    return report_.properties.back();
  }

  void for_trials(std::uint64_t stream, const std::function<void(Rng&)>& body) {
    const Rng base = Rng(report_.seed).split(stream);
    for (std::size_t t = 0; t < report_.trials; ++t) {
      Rng rng = base.split(t);
      body(rng);
    }
  }

  SuiteReport take() { return std::move(report_); }

 private:
  SuiteReport report_;
};

SuiteReport axioms_suite(std::size_t trials, std::uint64_t seed) {
  Suite suite("axioms", trials, seed);
  // Register in report order.
  suite.property("non_negativity", 1e-12);
  suite.property("event_additivity", 1e-12);
  suite.property("effect_additivity", 1e-10);
  suite.property("normalization", 1e-9);
  suite.for_trials(1, [&](Rng& rng) {
    const ClassicalSpace space = random_space(rng, 16);
    const int qdim = rng.uniform_int(1, 6);
    const HybridState w = varied_state(space, qdim, rng);
    std::vector<std::size_t> a_cells;
    std::vector<std::size_t> b_cells;
    for (std::size_t n = 0; n < space.size(); ++n) {
      const double u = rng.uniform();
      if (u < 0.4) a_cells.push_back(n);
      else if (u < 0.8) b_cells.push_back(n);
    }
    const Event a = Event::of(space.size(), a_cells);
    const Event b = Event::of(space.size(), b_cells);
    std::vector<std::size_t> union_cells = a_cells;
    union_cells.insert(union_cells.end(), b_cells.begin(), b_cells.end());
    const Event ab = Event::of(space.size(), union_cells);

    const std::vector<CMatrix> parts = random_effect_decomposition(qdim, rng.uniform_int(1, 4), rng);
    CMatrix sum = CMatrix::Zero(qdim, qdim);
    double part_total = 0.0;
    for (const CMatrix& part : parts) {
      const Effect e(part);
      sum += part;
      const double pa = probability(w, a, e);
      suite.property("non_negativity", 1e-12).record(std::max(0.0, -pa));
      suite.property("non_negativity", 1e-12).record(std::max(0.0, -probability(w, ab, e)));
      suite.property("event_additivity", 1e-12).record(std::abs(probability(w, ab, e) - pa - probability(w, b, e)));
      part_total += pa;
    }
    suite.property("effect_additivity", 1e-10).record(std::abs(probability(w, a, Effect(sum)) - part_total));
    suite.property("normalization", 1e-9).record(std::abs(probability(w, Event::all(space.size()), Effect::identity(qdim)) - 1.0));
  });
  return suite.take();
}

SuiteReport metric_suite(std::size_t trials, std::uint64_t seed) {
  Suite suite("metric", trials, seed);
  suite.for_trials(2, [&](Rng& rng) {
    const ClassicalSpace space = random_space(rng, 10);
    const int qdim = rng.uniform_int(1, 5);
    const HybridState w1 = varied_state(space, qdim, rng);
    const HybridState w2 = varied_state(space, qdim, rng);
    const HybridState w3 = varied_state(space, qdim, rng);
    const double d12 = distance(w1, w2);
    const double d21 = distance(w2, w1);
    const double d13 = distance(w1, w3);
    const double d23 = distance(w2, w3);
    suite.property("symmetry", 0.0).record(std::abs(d12 - d21));
    suite.property("identity", 1e-12).record(distance(w1, w1));
    suite.property("triangle", 1e-10).record(std::max(0.0, d13 - d12 - d23));
    suite.property("bounded_by_2", 1e-10).record(std::max(0.0, d12 - 2.0));
    suite.property("embedding_isometry", 1e-10).record(std::abs(trace_norm(embed_quantum(w1) - embed_quantum(w2)) - d12));
  });
  return suite.take();
}

SuiteReport channel_suite(std::size_t trials, std::uint64_t seed) {
  Suite suite("channel", trials, seed);
  suite.for_trials(3, [&](Rng& rng) {
    const ClassicalSpace src = random_space(rng, 6);
    const ClassicalSpace mid = random_space(rng, 6);
    const ClassicalSpace dst = random_space(rng, 6);
    const int q0 = rng.uniform_int(1, 4);
    const int q1 = rng.uniform_int(1, 4);
    const int q2 = rng.uniform_int(1, 3);
    const HybridChannel ch1 = random_channel(src, mid, q0, q1, rng.uniform_int(1, 3), rng);
    const HybridChannel ch2 = random_channel(mid, dst, q1, q2, rng.uniform_int(1, 2), rng);
    const HybridState w1 = varied_state(src, q0, rng);
    const HybridState w2 = varied_state(src, q0, rng);
    const HybridState out1 = apply(ch1, w1);
    const HybridState out2 = apply(ch1, w2);
    suite.property("output_positivity", 1e-9).record(positivity_excess(out1));
    suite.property("trace_preservation", 1e-9).record(std::abs(out1.total_trace() - 1.0));
    suite.property("contraction", 1e-9).record(std::max(0.0, distance(out1, out2) - distance(w1, w2)));
    const double t = rng.uniform();
    suite.property("convex_linearity", 1e-11).record(block_gap(apply(ch1, mix(t, w1, w2)), mix(t, out1, out2)));
    suite.property("composition", 1e-10).record(block_gap(apply(compose(ch2, ch1), w1), apply(ch2, out1)));
  });
  return suite.take();
}

SuiteReport vieq_suite(std::size_t trials, std::uint64_t seed) {
  Suite suite("vieq", trials, seed);
  suite.for_trials(4, [&](Rng& rng) {
    const ClassicalSpace src = random_space(rng, 5);
    const ClassicalSpace dst = random_space(rng, 5);
    const int d = rng.uniform_int(1, 3);
    const int d_out = rng.uniform_int(1, 3);
    const int dq = rng.uniform_int(1, 3);
    const HybridChannel ch = random_channel(src, dst, d, d_out, rng.uniform_int(1, 2), rng);
    const HybridState big = random_state(src, d * dq, rng);
    const Effect f(random_effect(dq, rng));
    const Effect e(random_effect(d_out, rng));
    std::vector<std::size_t> cells;
    for (std::size_t m = 0; m < dst.size(); ++m)
      if (rng.uniform() < 0.5) cells.push_back(m);
    const Event a = Event::of(dst.size(), cells);

    const HybridState evolved = apply(extend_with_ancilla(ch, dq), big);
    const double lhs = probability(evolved, a, Effect(kron(e.matrix(), f.matrix())));
    const double prob_f = probability(big, Event::all(src.size()), Effect(kron(identity(d), f.matrix())));
    double rhs = 0.0;
    if (prob_f > tol::kProbability) {
      const Conditioned cond = condition_on_effect(big, f);
      rhs = prob_f * probability(apply(ch, cond.state), a, e);
      suite.property("conditioned_probability", 1e-12).record(std::abs(cond.probability - prob_f));
    }
    suite.property("commuting_diagram", 1e-9).record(std::abs(lhs - rhs));
    const CMatrix anc_before = partial_trace(quantum_marginal(big), d, dq, Subsystem::A);
    const CMatrix anc_after = partial_trace(quantum_marginal(evolved), d_out, dq, Subsystem::A);
    suite.property("ancilla_marginal", 1e-10).record(max_abs(anc_before - anc_after));

    const HybridState small = random_state(src, d, rng);
    const CMatrix rho_q = random_density(dq, rng);
    const Conditioned trivial = condition_on_effect(tensor_with_quantum(small, rho_q), Effect::identity(dq));
    suite.property("identity_conditioning", 1e-12).record(block_gap(trivial.state, small));
  });
  return suite.take();
}

SuiteReport correlations_suite(std::size_t trials, std::uint64_t seed) {
  Suite suite("correlations", trials, seed);
  suite.for_trials(5, [&](Rng& rng) {
    const ClassicalSpace space = random_space(rng, 8);
    const int qdim = rng.uniform_int(1, 6);
    const HybridState w = varied_state(space, qdim, rng);
    const double info = mutual_information(w);
    const double entropy = von_neumann_entropy(quantum_marginal(w));
    suite.property("non_negativity", 1e-10).record(std::max(0.0, -info));
    suite.property("araki_lieb", 1e-9).record(std::max(0.0, info - 2.0 * entropy));

    const MarkovKernel kernel(space, space, random_stochastic(static_cast<int>(space.size()), static_cast<int>(space.size()), rng));
    const HybridChannel ch = non_interacting(kernel, random_kraus(qdim, rng.uniform_int(1, 3), rng));
    const MonotonicityReport mono = monotonicity_report(w, ch);
    suite.property("monotonicity", 1e-8).record(std::max(0.0, mono.i_after - mono.i_before));

    const HybridState full = random_state(space, qdim, rng);
    const ClassicalMarginal marginal = classical_marginal(full);
    RVector p(static_cast<Eigen::Index>(space.size()));
    for (std::size_t n = 0; n < space.size(); ++n) p(static_cast<Eigen::Index>(n)) = marginal.masses[n];
    const CMatrix reference = kron(quantum_marginal(full), p.cast<Complex>().asDiagonal().toDenseMatrix());
    const double full_info = mutual_information(full);
    suite.property("relative_entropy_identity", 1e-8).record(std::abs(relative_entropy(embed_quantum(full), reference) - full_info));
    suite.property("three_term_identity", 1e-9).record(std::abs(mutual_information_three_term(full) - full_info));
  });
  return suite.take();
}

SuiteReport locc_suite(std::size_t trials, std::uint64_t seed) {
  Suite suite("locc", trials, seed);
  suite.for_trials(6, [&](Rng& rng) {
    const int d1 = 2;
    const int d2 = rng.uniform_int(2, 3);
    const LoccProtocol protocol = random_protocol(d1, d2, rng.uniform_int(1, 3), 3, rng);
    const CMatrix rho = random_density(d1 * d2, rng);
    const LoccResult result = run(protocol, rho);
    suite.property("trace_preservation", 1e-9).record(std::abs(result.lambda.trace().real() - 1.0));
    suite.property("positivity", 1e-9).record(std::max(0.0, -min_eigenvalue(result.lambda)));

    double factor_gap = 0.0;
    for (const RecordOperator& op : record_operators(protocol)) factor_gap = std::max(factor_gap, max_abs(op.full - kron(op.first, op.second)));
    suite.property("tensor_structure", 1e-12).record(factor_gap);

    HybridState w = initial_record_state(protocol, rho);
    for (const HybridChannel& ch : as_hybrid_channels(protocol)) w = apply(ch, w);
    double gap = 0.0;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
      gap = std::max(gap, max_abs(w.mass(record_index(protocol, result.records[i])) - result.state.mass(i)));
    }
    suite.property("channels_match_run", 1e-10).record(gap);

    const int cells = rng.uniform_int(1, 8);
    const ClassicalSpace space = ClassicalSpace::counting(static_cast<std::size_t>(cells));
    SeparableTarget target{space, random_probabilities(cells, rng, 0.2), {}, {}};
    for (int n = 0; n < cells; ++n) {
      target.eta1.push_back(random_density(d1, rng, rng.uniform_int(1, d1)));
      target.eta2.push_back(random_density(d2, rng, rng.uniform_int(1, d2)));
    }
    const CMatrix separable = separable_from_ensemble(space, target.masses, target.eta1, target.eta2);
    const PptReport ppt = ppt_report(run(protocol, separable).lambda, d1, d2);
    suite.property("ppt_preserved", 1e-9).record(std::max(0.0, -ppt.min_eigenvalue));

    const SteeringScript script = steer_to_separable(target, d1, d2);
    suite.property("steering_reaches_target", 1e-9).record(max_abs(quantum_marginal(script.run(rho)) - separable));
  });
  return suite.take();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"axioms", "metric", "channel", "vieq", "correlations", "locc"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::size_t trials, std::uint64_t seed) {
  if (name == "axioms") return axioms_suite(trials, seed);
  if (name == "metric") return metric_suite(trials, seed);
  if (name == "channel") return channel_suite(trials, seed);
  if (name == "vieq") return vieq_suite(trials, seed);
  if (name == "correlations") return correlations_suite(trials, seed);
  if (name == "locc") return locc_suite(trials, seed);
  throw Error(ErrorCode::UnknownSuite, "unknown suite \"" + name + "\"");
}

}  // namespace hybridiq
