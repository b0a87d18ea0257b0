#include "cdeforest/functional.hpp"

#include <algorithm>
#include <string>

#include "cdeforest/errors.hpp"

namespace cdeforest {

namespace {

double cell_width(std::span<const double> domain, std::size_t i) {
  const std::size_t m = domain.size();
  if (m < 2) return 1.0;
  if (i == 0) return domain[1] - domain[0];
  if (i == m - 1) return domain[m - 1] - domain[m - 2];
  return (domain[i + 1] - domain[i - 1]) / 2.0;
}

}  // namespace

void FunctionalBlock::validate() const {
  if (domain_points.size() < 2) throw DomainError("functional block needs at least 2 points");
  for (std::size_t i = 1; i < domain_points.size(); ++i) {
    if (!(domain_points[i] > domain_points[i - 1])) {
      throw DomainError("functional domain points must be strictly increasing");
    }
  }
  if (values.cols() != domain_points.size()) {
    throw DomainError("curves have " + std::to_string(values.cols()) + " values but the domain has " +
                      std::to_string(domain_points.size()) + " points");
  }
}

void DomainPartition::validate(std::size_t m) const {
  std::size_t next = 0;
  for (const auto& iv : intervals) {
    if (iv.first != next || iv.last < iv.first) {
      throw DomainError("partition intervals do not tile the domain");
    }
    next = iv.last + 1;
  }
  if (next != m) throw DomainError("partition does not cover all " + std::to_string(m) + " points");
}

DomainPartition partition_from_draws(std::size_t m, const std::function<long()>& draw) {
  DomainPartition partition;
  std::size_t start = 0;
  while (start < m) {
    const long k = std::max(draw(), 1L);
    const std::size_t len = std::min(static_cast<std::size_t>(k), m - start);
    partition.intervals.push_back({start, start + len - 1});
    start += len;
  }
  return partition;
}

DomainPartition poisson_partition(std::size_t m, double lambda, Rng& rng) {
  if (!(lambda > 0.0)) throw DomainError("Poisson rate must be positive");
  std::poisson_distribution<long> poisson(lambda);
  return partition_from_draws(m, [&] { return poisson(rng); });
}

double interval_mean(std::span<const double> curve, std::span<const double> domain,
                     const Interval& interval) {
  if (interval.last >= curve.size() || curve.size() != domain.size()) {
    throw DomainError("interval outside the curve");
  }
  if (interval.first == interval.last) return curve[interval.first];
  double weighted = 0.0;
  double width = 0.0;
  for (std::size_t i = interval.first; i <= interval.last; ++i) {
    const double w = cell_width(domain, i);
    weighted += w * curve[i];
    width += w;
  }
  return weighted / width;
}

Matrix interval_means(const FunctionalBlock& block, const DomainPartition& partition) {
  partition.validate(block.length());
  Matrix out(block.values.rows(), partition.size());
  for (std::size_t r = 0; r < block.values.rows(); ++r) {
    auto curve = block.values.row(r);
    for (std::size_t k = 0; k < partition.size(); ++k) {
      out(r, k) = interval_mean(curve, block.domain_points, partition.intervals[k]);
    }
  }
  return out;
}

void functional_row(std::span<const std::span<const double>> curves,
                    std::span<const std::vector<double>> domains,
                    std::span<const DomainPartition> partitions,
                    std::span<const double> scalars, std::vector<double>& out) {
  if (curves.size() != domains.size() || curves.size() != partitions.size()) {
    throw DomainError("query has " + std::to_string(curves.size()) + " curves, model expects " +
                      std::to_string(domains.size()));
  }
  out.clear();
  for (std::size_t b = 0; b < curves.size(); ++b) {
    if (curves[b].size() != domains[b].size()) {
      throw DomainError("curve " + std::to_string(b) + " has " + std::to_string(curves[b].size()) +
                        " values, model expects " + std::to_string(domains[b].size()));
    }
    for (const auto& iv : partitions[b].intervals) {
      out.push_back(interval_mean(curves[b], domains[b], iv));
    }
  }
  out.insert(out.end(), scalars.begin(), scalars.end());
}

}  // namespace cdeforest
