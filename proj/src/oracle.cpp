#include "kmer/oracle.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

#include "kmer/errors.hpp"

namespace kmer {

std::vector<Rod> candidate_rods(const BoxSpec& box) {
  box.validate();
  std::vector<Rod> out;
  for (int y = 0; y < box.height; ++y)
    for (int x = 0; x < box.width; ++x)
      for (Orientation o : {Orientation::Horizontal, Orientation::Vertical}) {
        const Rod r{o, {x, y}};
        if (respects_containment(r, box) && respects_boundary(r, box)) out.push_back(r);
      }
  return out;
}

namespace {

std::vector<Rod> guarded_candidates(const BoxSpec& box, const EnumerationLimits& limits) {
  std::vector<Rod> c = candidate_rods(box);
  if (c.size() > limits.max_candidates) {
    const std::string msg = "enumeration refused: " + std::to_string(c.size()) +
                            " candidate rod positions (up to 2^" + std::to_string(c.size()) +
                            " subsets), limit is " + std::to_string(limits.max_candidates);
    if (!limits.override_guard) throw StateSpaceTooLarge(msg, c.size());
    std::cerr << "warning: " << msg << "; proceeding because the guard was overridden\n";
  }
  return c;
}

void descend(RodConfig& config, const std::vector<Rod>& candidates, std::size_t from,
             const std::function<void(const RodConfig&)>& visit) {
  visit(config);
  for (std::size_t i = from; i < candidates.size(); ++i) {
    if (!config.is_compatible(candidates[i])) continue;
    config.apply(candidates[i]);
    descend(config, candidates, i + 1, visit);
    config.remove(candidates[i]);
  }
}

}  // namespace

void enumerate_configs(const BoxSpec& box, const std::function<void(const RodConfig&)>& visit,
                       EnumerationLimits limits) {
  const std::vector<Rod> candidates = guarded_candidates(box, limits);
  RodConfig config(box);
  descend(config, candidates, 0, visit);
}

double PartitionPolynomial::evaluate(double z) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
    acc = acc * z + static_cast<double>(*it);
  return acc;
}

std::uint64_t PartitionPolynomial::total() const {
  std::uint64_t t = 0;
  for (auto c : coefficients) t += c;
  return t;
}

PartitionPolynomial partition_polynomial(const BoxSpec& box, EnumerationLimits limits) {
  PartitionPolynomial p;
  enumerate_configs(
      box,
      [&](const RodConfig& c) {
        if (p.coefficients.size() <= c.size()) p.coefficients.resize(c.size() + 1, 0);
        ++p.coefficients[c.size()];
      },
      limits);
  return p;
}

std::size_t ExactMeasure::index_of(const RodConfig& config) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == config) return i;
  throw std::out_of_range("configuration not in the enumerated ensemble");
}

ExactMeasure exact_measure(const BoxSpec& box, double z, EnumerationLimits limits) {
  if (z < 0.0) throw ValidationError("z must be >= 0");
  ExactMeasure m;
  enumerate_configs(
      box,
      [&](const RodConfig& c) {
        m.states.push_back(c);
        m.weights.push_back(std::pow(z, static_cast<double>(c.size())));
      },
      limits);
  for (double w : m.weights) m.normalization += w;
  return m;
}

double exact_expectation(const BoxSpec& box, double z,
                         const std::function<double(const RodConfig&)>& observable,
                         EnumerationLimits limits) {
  if (z < 0.0) throw ValidationError("z must be >= 0");
  double num = 0.0;
  double den = 0.0;
  enumerate_configs(
      box,
      [&](const RodConfig& c) {
        const double w = std::pow(z, static_cast<double>(c.size()));
        num += w * observable(c);
        den += w;
      },
      limits);
  return num / den;
}

StationarityReport exact_transition_check(const BoxSpec& box, double z, const Kernel& kernel,
                                          EnumerationLimits limits) {
  const ExactMeasure m = exact_measure(box, z, limits);
  std::map<std::vector<Rod>, std::size_t> index;
  for (std::size_t i = 0; i < m.states.size(); ++i) index.emplace(m.states[i].sorted_rods(), i);

  std::vector<double> pi_p(m.states.size(), 0.0);
  StationarityReport report;
  report.states = m.states.size();
  for (std::size_t i = 0; i < m.states.size(); ++i) {
    const double pi_i = m.probability(i);
    double row = 0.0;
    for (const Transition& t : kernel(m.states[i])) {
      auto it = index.find(t.next.sorted_rods());
      if (it == index.end())
        throw InvariantViolation("kernel reached a state outside the allowed ensemble");
      pi_p[it->second] += pi_i * t.probability;
      row += t.probability;
    }
    report.max_row_defect = std::max(report.max_row_defect, std::abs(row - 1.0));
  }
  for (std::size_t i = 0; i < m.states.size(); ++i)
    report.residual += std::abs(pi_p[i] - m.probability(i));
  return report;
}

}  // namespace kmer
