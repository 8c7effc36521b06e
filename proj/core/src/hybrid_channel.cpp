#include "hybridiq/hybrid_channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <Eigen/LU>
#include <Eigen/QR>

#include "hybridiq/error.hpp"
#include "hybridiq/parallel.hpp"

namespace hybridiq {

namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", value);
  return buf;
}

const std::vector<CMatrix> kNoBlocks;

std::string pair_name(std::size_t m, std::size_t n) {
  return "(" + std::to_string(m) + ", " + std::to_string(n) + ")";
}

}  // namespace

CompletenessReport check_completeness(std::size_t src_cells, std::size_t dst_cells, int qdim_src,
                                      int qdim_dst, const std::vector<BlockEntry>& blocks,
                                      double tolerance) {
  if (qdim_src < 1 || qdim_dst < 1) throw Error(ErrorCode::ShapeMismatch, "quantum dimensions must be positive");
  std::vector<CMatrix> gram(src_cells, CMatrix::Zero(qdim_src, qdim_src));
  for (const BlockEntry& entry : blocks) {
    if (entry.m >= dst_cells || entry.n >= src_cells) {
      throw Error(ErrorCode::ShapeMismatch, "block " + pair_name(entry.m, entry.n) + " is out of range");
    }
    for (const CMatrix& op : entry.ops) {
      if (op.rows() != qdim_dst || op.cols() != qdim_src) {
        throw Error(ErrorCode::ShapeMismatch, "block at " + pair_name(entry.m, entry.n) + " is " +
                                                  std::to_string(op.rows()) + "x" +
                                                  std::to_string(op.cols()));
      }
      if (!all_finite(op)) throw Error(ErrorCode::ShapeMismatch, "non-finite block at " + pair_name(entry.m, entry.n));
      gram[entry.n] += op.adjoint() * op;
    }
  }
  CompletenessReport report;
  report.deviations.resize(src_cells);
  const CMatrix eye = identity(qdim_src);
  for (std::size_t n = 0; n < src_cells; ++n) {
    const double dev = (gram[n] - eye).cwiseAbs().maxCoeff();
    report.deviations[n] = dev;
    if (dev > report.worst) {
      report.worst = dev;
      report.worst_cell = n;
    }
  }
  report.ok = report.worst <= tolerance;
  return report;
}

HybridChannel::HybridChannel(ClassicalSpace src, ClassicalSpace dst, int qdim_src, int qdim_dst,
                             std::vector<BlockEntry> blocks)
    : src_(std::move(src)), dst_(std::move(dst)), qdim_src_(qdim_src), qdim_dst_(qdim_dst) {
  const CompletenessReport report =
      check_completeness(src_.size(), dst_.size(), qdim_src_, qdim_dst_, blocks);
  if (!report.ok) {
    throw Error(ErrorCode::IncompleteChannel, "source cell " + std::to_string(*report.worst_cell) +
                                                  " deviates by " + format_double(report.worst));
  }
  std::vector<std::map<std::size_t, std::vector<CMatrix>>> grouped(src_.size());
  for (BlockEntry& entry : blocks) {
    if (entry.ops.empty()) continue;
    auto& slot = grouped[entry.n][entry.m];
    for (CMatrix& op : entry.ops) slot.push_back(std::move(op));
  }
  columns_.resize(src_.size());
  for (std::size_t n = 0; n < src_.size(); ++n) {
    for (auto& [m, ops] : grouped[n]) columns_[n].push_back(Transition{m, std::move(ops)});
  }
  index_rows();
}

void HybridChannel::index_rows() {
  rows_.assign(dst_.size(), {});
  for (std::size_t n = 0; n < columns_.size(); ++n)
    for (std::size_t t = 0; t < columns_[n].size(); ++t) rows_[columns_[n][t].m].emplace_back(n, t);
}

const std::vector<CMatrix>& HybridChannel::block(std::size_t m, std::size_t n) const {
  const auto& col = columns_.at(n);
  const auto it = std::lower_bound(col.begin(), col.end(), m,
                                   [](const Transition& t, std::size_t key) { return t.m < key; });
  if (it == col.end() || it->m != m) return kNoBlocks;
  return it->ops;
}

std::size_t HybridChannel::block_count() const {
  std::size_t total = 0;
  for (const auto& col : columns_)
    for (const Transition& t : col) total += t.ops.size();
  return total;
}

std::vector<BlockEntry> HybridChannel::entries() const {
  std::vector<BlockEntry> out;
  for (std::size_t n = 0; n < columns_.size(); ++n)
    for (const Transition& t : columns_[n]) out.push_back(BlockEntry{t.m, n, t.ops});
  std::stable_sort(out.begin(), out.end(), [](const BlockEntry& a, const BlockEntry& b) {
    return a.m != b.m ? a.m < b.m : a.n < b.n;
  });
  return out;
}

HybridState apply(const HybridChannel& channel, const HybridState& w) {
  if (!channel.src().same_as(w.space()) || channel.qdim_src() != w.qdim()) {
    throw Error(ErrorCode::SpaceMismatch, "channel source (" + std::to_string(channel.src().size()) +
                                              " cells, qdim " + std::to_string(channel.qdim_src()) +
                                              ") does not match state (" + std::to_string(w.cells()) +
                                              " cells, qdim " + std::to_string(w.qdim()) + ")");
  }
  const int q = channel.qdim_dst();
  std::vector<CMatrix> out(channel.dst().size());
  parallel_for(out.size(), [&](std::size_t m) {
    CMatrix acc = CMatrix::Zero(q, q);
    for (const auto& [n, t] : channel.feeders(m)) {
      const CMatrix& sigma = w.mass(n);
      for (const CMatrix& op : channel.column(n)[t].ops) acc.noalias() += op * sigma * op.adjoint();
    }
    out[m] = hermitian_part(acc);
  });
  return HybridState::unchecked(channel.dst(), q, std::move(out));
}

HybridChannel compose(const HybridChannel& second, const HybridChannel& first) {
  if (!first.dst().same_as(second.src()) || first.qdim_dst() != second.qdim_src()) {
    throw Error(ErrorCode::SpaceMismatch, "compose: first destination does not match second source");
  }
  std::vector<BlockEntry> blocks;
  for (std::size_t n = 0; n < first.src().size(); ++n) {
    std::map<std::size_t, std::vector<CMatrix>> by_target;
    for (const auto& inner : first.column(n)) {
      for (const auto& outer : second.column(inner.m)) {
        auto& slot = by_target[outer.m];
        for (const CMatrix& a : inner.ops)
          for (const CMatrix& b : outer.ops) slot.push_back(b * a);
      }
    }
    for (auto& [k, ops] : by_target) blocks.push_back(BlockEntry{k, n, std::move(ops)});
  }
  return HybridChannel(first.src(), second.dst(), first.qdim_src(), second.qdim_dst(), std::move(blocks));
}

HybridChannel identity_channel(const ClassicalSpace& space, int qdim) {
  std::vector<BlockEntry> blocks;
  blocks.reserve(space.size());
  for (std::size_t n = 0; n < space.size(); ++n) blocks.push_back(BlockEntry{n, n, {identity(qdim)}});
  return HybridChannel(space, space, qdim, qdim, std::move(blocks));
}

HybridChannel non_interacting(const MarkovKernel& kernel, const std::vector<CMatrix>& kraus) {
  const KernelReport report = validate_kernel(kernel);
  if (!report.ok) throw Error(ErrorCode::BadKernel, report.message);
  if (kraus.empty()) throw Error(ErrorCode::IncompleteKraus, "no Kraus operators");
  const auto q = static_cast<int>(kraus.front().rows());
  CMatrix gram = CMatrix::Zero(q, q);
  for (const CMatrix& op : kraus) {
    if (op.rows() != q || op.cols() != q) throw Error(ErrorCode::IncompleteKraus, "Kraus operators must be square and share a dimension");
    gram += op.adjoint() * op;
  }
  const double dev = (gram - identity(q)).cwiseAbs().maxCoeff();
  if (dev > tol::kCompleteness) {
    throw Error(ErrorCode::IncompleteKraus, "Σ L†L deviates from I by " + std::to_string(dev));
  }
  std::vector<BlockEntry> blocks;
  const RMatrix& p = kernel.matrix();
  for (Eigen::Index n = 0; n < p.cols(); ++n) {
    for (Eigen::Index m = 0; m < p.rows(); ++m) {
      if (p(m, n) <= 0.0) continue;
      const double amp = std::sqrt(p(m, n));
      BlockEntry entry{static_cast<std::size_t>(m), static_cast<std::size_t>(n), {}};
      for (const CMatrix& op : kraus) entry.ops.push_back(amp * op);
      blocks.push_back(std::move(entry));
    }
  }
  return HybridChannel(kernel.src(), kernel.dst(), q, q, std::move(blocks));
}

CoefficientKernel::CoefficientKernel(ClassicalSpace src, ClassicalSpace dst, int basis_size)
    : src_(std::move(src)), dst_(std::move(dst)), basis_size_(basis_size),
      k_(src_.size() * dst_.size()) {}

void CoefficientKernel::set(std::size_t m, std::size_t n, CMatrix k) {
  if (m >= dst_.size() || n >= src_.size()) throw Error(ErrorCode::ShapeMismatch, "coefficient pair " + pair_name(m, n) + " out of range");
  if (k.rows() != basis_size_ || k.cols() != basis_size_) {
    throw Error(ErrorCode::ShapeMismatch, "coefficient matrix at " + pair_name(m, n) + " must be " +
                                              std::to_string(basis_size_) + "x" + std::to_string(basis_size_));
  }
  k_[m * src_.size() + n] = std::move(k);
}

const CMatrix* CoefficientKernel::get(std::size_t m, std::size_t n) const {
  const auto& slot = k_.at(m * src_.size() + n);
  return slot ? &*slot : nullptr;
}

HybridChannel from_coeff_kernel(const std::vector<CMatrix>& basis, const CoefficientKernel& k) {
  if (basis.empty()) throw Error(ErrorCode::BadBasis, "empty basis");
  const auto d = static_cast<int>(basis.front().rows());
  const int d2 = d * d;
  if (static_cast<int>(basis.size()) != d2 || k.basis_size() != d2) {
    throw Error(ErrorCode::BadBasis, "basis of " + std::to_string(d) + "x" + std::to_string(d) +
                                         " operators needs " + std::to_string(d2) + " elements");
  }
  CMatrix stacked(d2, d2);
  for (int a = 0; a < d2; ++a) {
    if (basis[a].rows() != d || basis[a].cols() != d) throw Error(ErrorCode::BadBasis, "basis elements must be square of one dimension");
    stacked.col(a) = basis[a].reshaped();
  }
  Eigen::FullPivLU<CMatrix> lu(stacked);
  lu.setThreshold(1e-10);
  if (lu.rank() != d2) throw Error(ErrorCode::BadBasis, "basis elements are linearly dependent");

  std::vector<BlockEntry> blocks;
  for (std::size_t n = 0; n < k.src().size(); ++n) {
    for (std::size_t m = 0; m < k.dst().size(); ++m) {
      const CMatrix* coeff = k.get(m, n);
      if (coeff == nullptr) continue;
      const CMatrix s = hermitian_part(*coeff);
      const HermEig eig = hermitian_eig(s);
      const double top = eig.values(0);
      const double scale = std::max(1.0, eig.values.cwiseAbs().sum());
      if (eig.values.minCoeff() < -tol::kState * scale) {
        throw Error(ErrorCode::NotPSDCoefficients, "pair " + pair_name(m, n) + " has eigenvalue " +
                                                       std::to_string(eig.values.minCoeff()));
      }
      BlockEntry entry{m, n, {}};
      for (int g = 0; g < d2; ++g) {
        const double lambda = eig.values(g);
        if (!(lambda > 1e-12 * top)) continue;
        CMatrix op = CMatrix::Zero(d, d);
        for (int a = 0; a < d2; ++a) op += eig.vectors(a, g) * basis[a];
        entry.ops.push_back(std::sqrt(lambda) * op);
      }
      if (!entry.ops.empty()) blocks.push_back(std::move(entry));
    }
  }
  return HybridChannel(k.src(), k.dst(), d, d, std::move(blocks));
}

HybridChannel extend_with_ancilla(const HybridChannel& channel, int ancilla_dim) {
  if (ancilla_dim < 1) throw Error(ErrorCode::ShapeMismatch, "ancilla dimension must be positive");
  const CMatrix eye = identity(ancilla_dim);
  std::vector<BlockEntry> blocks = channel.entries();
  for (BlockEntry& entry : blocks)
    for (CMatrix& op : entry.ops) op = kron(op, eye);
  return HybridChannel(channel.src(), channel.dst(), channel.qdim_src() * ancilla_dim,
                       channel.qdim_dst() * ancilla_dim, std::move(blocks));
}

HybridChannel random_channel(const ClassicalSpace& src, const ClassicalSpace& dst, int qdim_src,
                             int qdim_dst, int branching, std::uint64_t seed) {
  Rng rng(seed);
  return random_channel(src, dst, qdim_src, qdim_dst, branching, rng);
}

HybridChannel random_channel(const ClassicalSpace& src, const ClassicalSpace& dst, int qdim_src,
                             int qdim_dst, int branching, Rng& rng) {
  if (branching < 1) throw Error(ErrorCode::ShapeMismatch, "branching must be at least 1");
  // Each column needs at least qdim_src stacked Kraus rows for an invertible Gram matrix.
  const int rows_per_op = qdim_dst * static_cast<int>(dst.size());
  branching = std::max(branching, (qdim_src + rows_per_op - 1) / rows_per_op);
  std::vector<BlockEntry> blocks;
  for (std::size_t n = 0; n < src.size(); ++n) {
    // Stack the column's Kraus rows and replace them by the thin Q factor: Q = K R^{-1} is an
    // isometry to machine precision even when the draw's weights make K'K badly conditioned.
    const auto ops = static_cast<Eigen::Index>(dst.size()) * branching;
    CMatrix stacked(ops * qdim_dst, qdim_src);
    for (Eigen::Index k = 0; k < ops; ++k)
      stacked.middleRows(k * qdim_dst, qdim_dst) = std::exp(1.5 * rng.normal()) * random_ginibre(qdim_dst, qdim_src, rng);
    const Eigen::HouseholderQR<CMatrix> qr(stacked);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(stacked.rows(), qdim_src);
    for (std::size_t m = 0; m < dst.size(); ++m) {
      BlockEntry entry{m, n, {}};
      for (int a = 0; a < branching; ++a)
        entry.ops.push_back(q.middleRows((static_cast<Eigen::Index>(m) * branching + a) * qdim_dst, qdim_dst));
      blocks.push_back(std::move(entry));
    }
  }
  return HybridChannel(src, dst, qdim_src, qdim_dst, std::move(blocks));
}

ChannelSequence& ChannelSequence::then(const HybridChannel& channel) {
  if (stages_.empty()) {
    stages_.push_back(channel);
    return *this;
  }
  const HybridChannel& last = stages_.back();
  if (!last.dst().same_as(channel.src()) || last.qdim_dst() != channel.qdim_src()) {
    throw Error(ErrorCode::SpaceMismatch, "sequence stage " + std::to_string(stages_.size()) +
                                              " does not accept the previous output");
  }
  // Size of the merged block list for every (k, n).
  bool small = true;
  for (std::size_t n = 0; n < last.src().size() && small; ++n) {
    std::map<std::size_t, std::size_t> counts;
    for (const auto& inner : last.column(n))
      for (const auto& outer : channel.column(inner.m)) {
        std::size_t& c = counts[outer.m];
        c += inner.ops.size() * outer.ops.size();
        if (c > kMaxMergedBlocks) small = false;
      }
  }
  if (small) {
    stages_.back() = compose(channel, last);
  } else {
    stages_.push_back(channel);
  }
  return *this;
}

HybridState ChannelSequence::apply(const HybridState& w) const {
  if (stages_.empty()) return w;
  HybridState current = hybridiq::apply(stages_.front(), w);
  for (std::size_t s = 1; s < stages_.size(); ++s) current = hybridiq::apply(stages_[s], current);
  return current;
}

}  // namespace hybridiq
