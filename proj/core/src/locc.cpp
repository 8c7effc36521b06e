#include "hybridiq/locc.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "hybridiq/error.hpp"

namespace hybridiq {

namespace {

constexpr std::size_t kMaxRecords = 100'000;

bool is_zero(const CMatrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

std::size_t checked_product(const std::vector<std::size_t>& factors) {
  std::size_t total = 1;
  for (std::size_t f : factors) {
    if (f != 0 && total > kMaxRecords / f) {
      throw Error(ErrorCode::RecordSpaceTooLarge, "record space exceeds " + std::to_string(kMaxRecords) + " cells");
    }
    total *= f;
  }
  if (total > kMaxRecords) {
    throw Error(ErrorCode::RecordSpaceTooLarge, "record space has " + std::to_string(total) + " cells");
  }
  return total;
}

void require_density(const CMatrix& rho, Eigen::Index dim, const char* what) {
  if (rho.rows() != dim || rho.cols() != dim || !is_density_matrix(rho)) {
    throw Error(ErrorCode::NotAState, std::string(what) + " is not a density matrix of dimension " + std::to_string(dim));
  }
}

}  // namespace

std::string history_key(const History& history) {
  std::string key;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i) key += '.';
    key += std::to_string(history[i]);
  }
  return key;
}

History parse_history_key(const std::string& key) {
  History out;
  if (key.empty()) return out;
  std::stringstream in(key);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::ParseError, "bad history key \"" + key + "\"");
    }
    out.push_back(std::stoi(part));
  }
  if (!key.empty() && key.back() == '.') throw Error(ErrorCode::ParseError, "bad history key \"" + key + "\"");
  return out;
}

int default_side(std::size_t round_index) { return round_index % 2 == 0 ? 1 : 2; }

LoccProtocol::LoccProtocol(int d1, int d2, std::vector<LoccRound> rounds)
    : d1_(d1), d2_(d2), rounds_(std::move(rounds)) {
  if (d1_ < 1 || d2_ < 1) throw Error(ErrorCode::ShapeMismatch, "protocol dimensions must be positive");
  if (rounds_.empty()) throw Error(ErrorCode::ShapeMismatch, "protocol needs at least one round");
  for (std::size_t r = 0; r < rounds_.size(); ++r) {
    const LoccRound& round = rounds_[r];
    if (round.side != 1 && round.side != 2) throw Error(ErrorCode::ShapeMismatch, "round " + std::to_string(r + 1) + ": side must be 1 or 2");
    if (round.outcomes < 1) throw Error(ErrorCode::ShapeMismatch, "round " + std::to_string(r + 1) + ": outcomes must be >= 1");
    const int d = side_dim(round.side);
    for (const auto& [history, elements] : round.instrument) {
      const std::string where = "round " + std::to_string(r + 1) + " history \"" + history_key(history) + "\"";
      if (history.size() != r) throw Error(ErrorCode::ShapeMismatch, where + ": wrong history length");
      for (std::size_t s = 0; s < history.size(); ++s) {
        if (history[s] < 1 || history[s] > rounds_[s].outcomes) {
          throw Error(ErrorCode::ShapeMismatch, where + ": outcome label out of range");
        }
      }
      if (static_cast<int>(elements.size()) != round.outcomes) {
        throw Error(ErrorCode::ShapeMismatch, where + ": expected " + std::to_string(round.outcomes) + " elements");
      }
      CMatrix gram = CMatrix::Zero(d, d);
      for (const CMatrix& v : elements) {
        if (v.rows() != d || v.cols() != d) throw Error(ErrorCode::ShapeMismatch, where + ": element has wrong shape");
        gram += v.adjoint() * v;
      }
      const double dev = (gram - identity(d)).cwiseAbs().maxCoeff();
      if (dev > tol::kCompleteness) {
        throw Error(ErrorCode::IncompleteInstrument, where + ": Σ V†V deviates from I by " + std::to_string(dev));
      }
    }
  }
}

const std::vector<CMatrix>* LoccProtocol::instrument(std::size_t round, const History& history) const {
  const auto& table = rounds_.at(round).instrument;
  const auto it = table.find(history);
  return it == table.end() ? nullptr : &it->second;
}

CMatrix LoccProtocol::lift(std::size_t round, const CMatrix& local) const {
  return rounds_.at(round).side == 1 ? kron(local, identity(d2_)) : kron(identity(d1_), local);
}

std::vector<RecordOperator> record_operators(const LoccProtocol& protocol) {
  std::vector<std::size_t> outcomes;
  for (const LoccRound& round : protocol.rounds()) outcomes.push_back(static_cast<std::size_t>(round.outcomes));
  std::vector<RecordOperator> out;
  out.reserve(checked_product(outcomes));

  const int d1 = protocol.d1();
  const int d2 = protocol.d2();
  const std::size_t depth = protocol.rounds().size();
  History history;
  std::function<void(const CMatrix&, const CMatrix&, const CMatrix&)> descend =
      [&](const CMatrix& full, const CMatrix& first, const CMatrix& second) {
        const std::size_t r = history.size();
        if (r == depth) {
          out.push_back(RecordOperator{history, full, first, second});
          return;
        }
        const LoccRound& round = protocol.rounds()[r];
        const bool reachable = !is_zero(full);
        const std::vector<CMatrix>* elements = protocol.instrument(r, history);
        if (reachable && elements == nullptr) {
          throw Error(ErrorCode::IncompleteInstrument,
                      "round " + std::to_string(r + 1) + " has no instrument for history \"" + history_key(history) + "\"");
        }
        for (int k = 1; k <= round.outcomes; ++k) {
          history.push_back(k);
          if (elements == nullptr) {
            descend(CMatrix::Zero(full.rows(), full.cols()), CMatrix::Zero(d1, d1), CMatrix::Zero(d2, d2));
          } else {
            const CMatrix& v = (*elements)[k - 1];
            if (round.side == 1) {
              descend(protocol.lift(r, v) * full, v * first, second);
            } else {
              descend(protocol.lift(r, v) * full, first, v * second);
            }
          }
          history.pop_back();
        }
      };
  descend(identity(d1 * d2), identity(d1), identity(d2));
  return out;
}

LoccResult run(const LoccProtocol& protocol, const CMatrix& rho) {
  const int dim = protocol.d1() * protocol.d2();
  require_density(rho, dim, "run: ρ");
  const CMatrix clean = hermitian_part(rho);
  const std::vector<RecordOperator> ops = record_operators(protocol);
  std::vector<CMatrix> masses;
  std::vector<OutcomeRecord> records;
  masses.reserve(ops.size());
  records.reserve(ops.size());
  CMatrix lambda = CMatrix::Zero(dim, dim);
  for (const RecordOperator& op : ops) {
    masses.push_back(hermitian_part(op.full * clean * op.full.adjoint()));
    lambda += masses.back();
    records.push_back(op.record);
  }
  const ClassicalSpace space = ClassicalSpace::counting(masses.size());
  HybridState state = HybridState::unchecked(space, dim, std::move(masses));
  return LoccResult{std::move(state), lambda, std::move(records)};
}

ClassicalSpace record_space(const LoccProtocol& protocol) {
  std::vector<std::size_t> radix;
  for (const LoccRound& round : protocol.rounds()) radix.push_back(static_cast<std::size_t>(round.outcomes) + 1);
  return ClassicalSpace::counting(checked_product(radix));
}

std::size_t record_index(const LoccProtocol& protocol, const OutcomeRecord& record) {
  const auto& rounds = protocol.rounds();
  if (record.size() != rounds.size()) throw Error(ErrorCode::BadEvent, "record has wrong length");
  std::size_t index = 0;
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    if (record[r] < 0 || record[r] > rounds[r].outcomes) throw Error(ErrorCode::BadEvent, "record label out of range");
    index = index * static_cast<std::size_t>(rounds[r].outcomes + 1) + static_cast<std::size_t>(record[r]);
  }
  return index;
}

HybridState initial_record_state(const LoccProtocol& protocol, const CMatrix& rho) {
  const int dim = protocol.d1() * protocol.d2();
  require_density(rho, dim, "initial_record_state: ρ");
  const ClassicalSpace space = record_space(protocol);
  std::vector<double> masses(space.size(), 0.0);
  masses[0] = 1.0;
  return product_state(space, masses, rho);
}

std::vector<HybridChannel> as_hybrid_channels(const LoccProtocol& protocol) {
  const ClassicalSpace space = record_space(protocol);
  const auto& rounds = protocol.rounds();
  const std::size_t depth = rounds.size();
  const int dim = protocol.d1() * protocol.d2();

  std::vector<std::size_t> stride(depth, 1);
  for (std::size_t r = depth; r-- > 1;) stride[r - 1] = stride[r] * static_cast<std::size_t>(rounds[r].outcomes + 1);

  // Accumulated W for a history; zero marks an unreachable prefix.
  std::map<History, CMatrix> prefix_cache;
  std::function<const CMatrix&(const History&)> prefix_operator = [&](const History& h) -> const CMatrix& {
    if (auto it = prefix_cache.find(h); it != prefix_cache.end()) return it->second;
    CMatrix w;
    if (h.empty()) {
      w = identity(dim);
    } else {
      const History parent(h.begin(), h.end() - 1);
      const CMatrix& above = prefix_operator(parent);
      const std::vector<CMatrix>* elements = protocol.instrument(parent.size(), parent);
      if (is_zero(above) || elements == nullptr) {
        w = CMatrix::Zero(dim, dim);
      } else {
        w = protocol.lift(parent.size(), (*elements)[h.back() - 1]) * above;
      }
    }
    return prefix_cache.emplace(h, std::move(w)).first->second;
  };

  std::vector<HybridChannel> channels;
  channels.reserve(depth);
  for (std::size_t r = 0; r < depth; ++r) {
    std::vector<BlockEntry> blocks;
    blocks.reserve(space.size());
    History prefix(r);
    for (std::size_t src = 0; src < space.size(); ++src) {
      bool complete_prefix = true;
      for (std::size_t s = 0; s < r; ++s) {
        prefix[s] = static_cast<int>((src / stride[s]) % static_cast<std::size_t>(rounds[s].outcomes + 1));
        if (prefix[s] == 0) complete_prefix = false;
      }
      const std::vector<CMatrix>* elements = complete_prefix ? protocol.instrument(r, prefix) : nullptr;
      if (complete_prefix && elements == nullptr && !is_zero(prefix_operator(prefix))) {
        throw Error(ErrorCode::IncompleteInstrument,
                    "round " + std::to_string(r + 1) + " has no instrument for history \"" + history_key(prefix) + "\"");
      }
      if (elements == nullptr) {
        blocks.push_back(BlockEntry{src, src, {identity(dim)}});
        continue;
      }
      const std::size_t digit = (src / stride[r]) % static_cast<std::size_t>(rounds[r].outcomes + 1);
      const std::size_t base = src - digit * stride[r];
      for (int k = 1; k <= rounds[r].outcomes; ++k) {
        blocks.push_back(BlockEntry{base + static_cast<std::size_t>(k) * stride[r], src,
                                    {protocol.lift(r, (*elements)[k - 1])}});
      }
    }
    channels.emplace_back(space, space, dim, dim, std::move(blocks));
  }
  return channels;
}

CMatrix separable_from_ensemble(const std::vector<double>& masses, const std::vector<CMatrix>& eta1,
                                const std::vector<CMatrix>& eta2) {
  if (masses.empty() || masses.size() != eta1.size() || masses.size() != eta2.size()) {
    throw Error(ErrorCode::NotAState, "separable_from_ensemble: need one state pair per cell");
  }
  double total = 0.0;
  for (double p : masses) {
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::NotAState, "separable_from_ensemble: negative mass");
    total += p;
  }
  if (std::abs(total - 1.0) > tol::kState) {
    throw Error(ErrorCode::NotAState, "separable_from_ensemble: masses sum to " + std::to_string(total));
  }
  const Eigen::Index d1 = eta1.front().rows();
  const Eigen::Index d2 = eta2.front().rows();
  CMatrix out = CMatrix::Zero(d1 * d2, d1 * d2);
  for (std::size_t n = 0; n < masses.size(); ++n) {
    require_density(eta1[n], d1, "separable_from_ensemble: η1");
    require_density(eta2[n], d2, "separable_from_ensemble: η2");
    if (masses[n] == 0.0) continue;
    out += masses[n] * kron(hermitian_part(eta1[n]), hermitian_part(eta2[n]));
  }
  return out;
}

CMatrix separable_from_ensemble(const ClassicalSpace& space, const std::vector<double>& masses,
                                const std::vector<CMatrix>& eta1, const std::vector<CMatrix>& eta2) {
  if (masses.size() != space.size()) throw Error(ErrorCode::NotAState, "separable_from_ensemble: mass vector has wrong length");
  return separable_from_ensemble(masses, eta1, eta2);
}

PptReport ppt_report(const CMatrix& rho, int d1, int d2, double tolerance) {
  if (d1 < 1 || d2 < 1 || rho.rows() != static_cast<Eigen::Index>(d1) * d2 || rho.cols() != rho.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "is_ppt: ρ does not act on C^" + std::to_string(d1) + " ⊗ C^" + std::to_string(d2));
  }
  PptReport report;
  report.min_eigenvalue = min_eigenvalue(partial_transpose(hermitian_part(rho), d1, d2, Subsystem::B));
  report.ppt = report.min_eigenvalue >= -tolerance;
  report.conclusive = d1 * d2 <= 6;
  return report;
}

bool is_ppt(const CMatrix& rho, int d1, int d2) { return ppt_report(rho, d1, d2).ppt; }

namespace {

// L_0 = I − |0⟩⟨0|, L_k = √λ_k |v_k⟩⟨0| for the eigenpairs of η.
std::vector<CMatrix> preparation_kraus(const CMatrix& eta) {
  const auto d = static_cast<int>(eta.rows());
  std::vector<CMatrix> ops;
  ops.push_back(identity(d) - matrix_unit(d, 0, 0));
  const HermEig eig = hermitian_eig(eta);
  for (int k = 0; k < d; ++k) {
    const double lambda = eig.values(k);
    if (!(lambda > 0.0)) continue;
    CMatrix op = CMatrix::Zero(d, d);
    op.col(0) = std::sqrt(lambda) * eig.vectors.col(k);
    ops.push_back(std::move(op));
  }
  return ops;
}

HybridChannel preparation_channel(const ClassicalSpace& space, const std::vector<CMatrix>& etas, int side,
                                  int d1, int d2) {
  std::vector<BlockEntry> blocks;
  blocks.reserve(space.size());
  for (std::size_t n = 0; n < space.size(); ++n) {
    BlockEntry entry{n, n, {}};
    for (const CMatrix& local : preparation_kraus(etas[n])) {
      entry.ops.push_back(side == 1 ? kron(local, identity(d2)) : kron(identity(d1), local));
    }
    blocks.push_back(std::move(entry));
  }
  return HybridChannel(space, space, d1 * d2, d1 * d2, std::move(blocks));
}

LoccProtocol collapse_protocol(int d1, int d2) {
  std::vector<LoccRound> rounds(2);
  rounds[0].side = 1;
  rounds[0].outcomes = d1;
  for (int k = 0; k < d1; ++k) rounds[0].instrument[{}].push_back(matrix_unit(d1, 0, k));
  rounds[1].side = 2;
  rounds[1].outcomes = d2;
  for (int k = 1; k <= d1; ++k)
    for (int kp = 0; kp < d2; ++kp) rounds[1].instrument[{k}].push_back(matrix_unit(d2, 0, kp));
  return LoccProtocol(d1, d2, std::move(rounds));
}

}  // namespace

HybridState SteeringScript::run(const CMatrix& rho) const {
  const LoccResult collapsed = hybridiq::run(collapse, rho);
  HybridState w = product_state(target.space, target.masses, collapsed.lambda);
  w = apply(prepare_first, w);
  return apply(prepare_second, w);
}

SteeringScript steer_to_separable(const SeparableTarget& target, int d1, int d2) {
  if (target.masses.size() != target.space.size() || target.eta1.size() != target.space.size() ||
      target.eta2.size() != target.space.size()) {
    throw Error(ErrorCode::NotAState, "steer_to_separable: target needs one (p, η1, η2) per cell");
  }
  // Validates masses and every η.
  (void)separable_from_ensemble(target.masses, target.eta1, target.eta2);
  if (target.eta1.front().rows() != d1 || target.eta2.front().rows() != d2) {
    throw Error(ErrorCode::NotAState, "steer_to_separable: target dimensions do not match");
  }
  return SteeringScript{target, collapse_protocol(d1, d2),
                        preparation_channel(target.space, target.eta1, 1, d1, d2),
                        preparation_channel(target.space, target.eta2, 2, d1, d2)};
}

LoccProtocol random_protocol(int d1, int d2, int rounds, int max_outcomes, Rng& rng) {
  std::vector<LoccRound> plan(static_cast<std::size_t>(rounds));
  std::vector<History> histories{{}};
  for (int r = 0; r < rounds; ++r) {
    LoccRound& round = plan[r];
    round.side = default_side(static_cast<std::size_t>(r));
    round.outcomes = rng.uniform_int(1, max_outcomes);
    const int d = round.side == 1 ? d1 : d2;
    std::vector<History> next;
    for (const History& h : histories) {
      std::vector<CMatrix> elements;
      if (rng.uniform() < 0.3) {
        // Projective measurement in a random basis, outcomes grouped.
        const CMatrix u = random_unitary(d, rng);
        elements.assign(round.outcomes, CMatrix::Zero(d, d));
        for (int i = 0; i < d; ++i) {
          const int k = i % round.outcomes;
          elements[k] += u.col(i) * u.col(i).adjoint();
        }
      } else {
        elements = random_kraus(d, round.outcomes, rng);
      }
      round.instrument.emplace(h, std::move(elements));
      for (int k = 1; k <= round.outcomes; ++k) {
        History child = h;
        child.push_back(k);
        next.push_back(std::move(child));
      }
    }
    histories = std::move(next);
  }
  return LoccProtocol(d1, d2, std::move(plan));
}

}  // namespace hybridiq
