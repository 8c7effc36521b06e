#include "hybridiq/classical_space.hpp"

#include <cmath>
#include <numeric>

#include "hybridiq/error.hpp"

namespace hybridiq {

ClassicalSpace::ClassicalSpace(std::vector<double> weights, std::vector<CellLabel> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
  if (weights_.empty()) throw Error(ErrorCode::BadRange, "classical space needs at least one cell");
  for (std::size_t n = 0; n < weights_.size(); ++n) {
    if (!std::isfinite(weights_[n]) || weights_[n] <= 0.0) {
      throw Error(ErrorCode::BadRange,
                  "cell " + std::to_string(n) + " has weight " + std::to_string(weights_[n]));
    }
  }
  if (!labels_.empty() && labels_.size() != weights_.size()) {
    throw Error(ErrorCode::BadRange, "label count does not match cell count");
  }
}

ClassicalSpace ClassicalSpace::counting(std::size_t cells) {
  return ClassicalSpace(std::vector<double>(cells, 1.0));
}

double ClassicalSpace::total_measure() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

bool ClassicalSpace::same_as(const ClassicalSpace& other) const {
  if (size() != other.size()) return false;
  for (std::size_t n = 0; n < size(); ++n) {
    const double a = weights_[n];
    const double b = other.weights_[n];
    if (std::abs(a - b) > 1e-12 * std::max(a, b)) return false;
  }
  return true;
}

ClassicalSpace discretize_interval(double a, double b, std::size_t cells) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b) || cells < 1) {
    throw Error(ErrorCode::BadRange, "discretize_interval needs a < b and N >= 1");
  }
  const double width = (b - a) / static_cast<double>(cells);
  std::vector<double> weights(cells, width);
  std::vector<CellLabel> labels;
  labels.reserve(cells);
  for (std::size_t n = 0; n < cells; ++n) {
    const double lo = a + width * static_cast<double>(n);
    const double hi = n + 1 == cells ? b : a + width * static_cast<double>(n + 1);
    labels.emplace_back(Interval{lo, hi});
  }
  return ClassicalSpace(std::move(weights), std::move(labels));
}

MarkovKernel::MarkovKernel(ClassicalSpace src, ClassicalSpace dst, RMatrix transition)
    : src_(std::move(src)), dst_(std::move(dst)), p_(std::move(transition)) {
  if (p_.rows() != static_cast<Eigen::Index>(dst_.size()) ||
      p_.cols() != static_cast<Eigen::Index>(src_.size())) {
    throw Error(ErrorCode::ShapeMismatch,
                "kernel matrix is " + std::to_string(p_.rows()) + "x" + std::to_string(p_.cols()) +
                    ", spaces need " + std::to_string(dst_.size()) + "x" +
                    std::to_string(src_.size()));
  }
}

KernelReport validate_kernel(const MarkovKernel& kernel) {
  KernelReport report;
  const RMatrix& p = kernel.matrix();
  for (Eigen::Index n = 0; n < p.cols(); ++n) {
    double sum = 0.0;
    for (Eigen::Index m = 0; m < p.rows(); ++m) {
      const double v = p(m, n);
      if (!std::isfinite(v) || v < 0.0) {
        report.ok = false;
        report.column = static_cast<std::size_t>(n);
        report.deviation = std::isfinite(v) ? -v : INFINITY;
        report.message = "column " + std::to_string(n) + ": entry (" + std::to_string(m) + ", " +
                         std::to_string(n) + ") = " + std::to_string(v) + " is not a probability";
        return report;
      }
      sum += v;
    }
    const double dev = std::abs(sum - 1.0);
    report.deviation = std::max(report.deviation, dev);
    if (dev > tol::kKernel) {
      report.ok = false;
      report.column = static_cast<std::size_t>(n);
      report.deviation = dev;
      report.message = "column " + std::to_string(n) + " sums to " + std::to_string(sum);
      return report;
    }
  }
  return report;
}

MarkovKernel kernel_from_map(const ClassicalSpace& space, const std::vector<std::size_t>& map) {
  return kernel_from_map(space, space, map);
}

MarkovKernel kernel_from_map(const ClassicalSpace& src, const ClassicalSpace& dst,
                             const std::vector<std::size_t>& map) {
  if (map.size() != src.size()) {
    throw Error(ErrorCode::BadMap, "map has " + std::to_string(map.size()) + " entries for " +
                                       std::to_string(src.size()) + " cells");
  }
  RMatrix p = RMatrix::Zero(dst.size(), src.size());
  for (std::size_t n = 0; n < map.size(); ++n) {
    if (map[n] >= dst.size()) {
      throw Error(ErrorCode::BadMap,
                  "cell " + std::to_string(n) + " maps to " + std::to_string(map[n]));
    }
    p(map[n], n) = 1.0;
  }
  return MarkovKernel(src, dst, std::move(p));
}

MarkovKernel compose_kernels(const MarkovKernel& second, const MarkovKernel& first) {
  if (!first.dst().same_as(second.src())) {
    throw Error(ErrorCode::SpaceMismatch, "compose_kernels: inner destination != outer source");
  }
  return MarkovKernel(first.src(), second.dst(), second.matrix() * first.matrix());
}

std::vector<double> push_forward(const MarkovKernel& kernel, const std::vector<double>& masses) {
  if (masses.size() != kernel.src().size()) {
    throw Error(ErrorCode::SpaceMismatch, "push_forward: mass vector has wrong length");
  }
  std::vector<double> out(kernel.dst().size(), 0.0);
  for (std::size_t m = 0; m < out.size(); ++m)
    for (std::size_t n = 0; n < masses.size(); ++n) out[m] += kernel(m, n) * masses[n];
  return out;
}

}  // namespace hybridiq
