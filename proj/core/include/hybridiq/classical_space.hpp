#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hybridiq/operator_core.hpp"

namespace hybridiq {

struct Interval {
  double lo;
  double hi;
  bool operator==(const Interval&) const = default;
};

// Optional per-cell metadata. Never used in computation.
using CellLabel = std::variant<Interval, long long>;

// A finite partition of the classical sample space: cell n carries reference
// measure μ_n > 0.
class ClassicalSpace {
 public:
  // Throws BadRange unless weights is non-empty and every weight is finite
  // and strictly positive, or if labels are given with the wrong length.
  explicit ClassicalSpace(std::vector<double> weights, std::vector<CellLabel> labels = {});

  // N cells of unit weight (counting measure).
  static ClassicalSpace counting(std::size_t cells);

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t cell) const { return weights_.at(cell); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<CellLabel>& labels() const noexcept { return labels_; }
  double total_measure() const;

  // Same cell count and weights equal to relative 1e-12; labels ignored.
  bool same_as(const ClassicalSpace& other) const;

 private:
  std::vector<double> weights_;
  std::vector<CellLabel> labels_;
};

// N equal cells covering [a, b); throws BadRange unless a < b and N ≥ 1.
ClassicalSpace discretize_interval(double a, double b, std::size_t cells);

// Transition matrix between two cell spaces: P(m, n) is the probability mass
// moved from source cell n to destination cell m. The constructor only checks
// shapes; stochasticity is checked by validate_kernel.
class MarkovKernel {
 public:
  MarkovKernel(ClassicalSpace src, ClassicalSpace dst, RMatrix transition);

  const ClassicalSpace& src() const noexcept { return src_; }
  const ClassicalSpace& dst() const noexcept { return dst_; }
  const RMatrix& matrix() const noexcept { return p_; }
  double operator()(std::size_t m, std::size_t n) const { return p_(m, n); }

 private:
  ClassicalSpace src_;
  ClassicalSpace dst_;
  RMatrix p_;
};

struct KernelReport {
  bool ok = true;
  std::optional<std::size_t> column;  // first offending source column
  double deviation = 0.0;             // worst |Σ_m P(m,n) − 1| or most negative entry
  std::string message;
};

KernelReport validate_kernel(const MarkovKernel& kernel);

// Deterministic kernel P(m, n) = [m = map(n)]; throws BadMap when some image
// is out of range or the map has the wrong length.
MarkovKernel kernel_from_map(const ClassicalSpace& space, const std::vector<std::size_t>& map);
MarkovKernel kernel_from_map(const ClassicalSpace& src, const ClassicalSpace& dst,
                             const std::vector<std::size_t>& map);

// P2 ∘ P1 (apply P1 first). Throws SpaceMismatch when P1.dst ≠ P2.src.
MarkovKernel compose_kernels(const MarkovKernel& second, const MarkovKernel& first);

// Push classical masses through the kernel: (P p)_m.
std::vector<double> push_forward(const MarkovKernel& kernel, const std::vector<double>& masses);

}  // namespace hybridiq
