#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "kmer/lattice.hpp"

namespace kmer {

// Candidate positions above this count are refused unless overridden.
inline constexpr std::size_t kMaxEnumerationCandidates = 32;

struct EnumerationLimits {
  std::size_t max_candidates = kMaxEnumerationCandidates;
  bool override_guard = false;  // proceed past the guard, warning on stderr
};

// Every single rod that is allowed on its own in the box: containment and
// boundary condition respected. Ordered row-major by center, H before V.
std::vector<Rod> candidate_rods(const BoxSpec& box);

// Depth-first enumeration of all allowed configurations, the empty one first.
// The visitor sees a configuration that is only valid during the call.
void enumerate_configs(const BoxSpec& box, const std::function<void(const RodConfig&)>& visit,
                       EnumerationLimits limits = {});

struct PartitionPolynomial {
  // coefficients[n] = number of allowed configurations with n rods.
  std::vector<std::uint64_t> coefficients;

  double evaluate(double z) const;
  std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  std::uint64_t total() const;
};

PartitionPolynomial partition_polynomial(const BoxSpec& box, EnumerationLimits limits = {});

struct ExactMeasure {
  std::vector<RodConfig> states;
  std::vector<double> weights;  // z^{|R|}
  double normalization = 0.0;

  double probability(std::size_t i) const { return weights[i] / normalization; }
  // Index of the state equal to `config`; throws std::out_of_range if absent.
  std::size_t index_of(const RodConfig& config) const;
};

ExactMeasure exact_measure(const BoxSpec& box, double z, EnumerationLimits limits = {});

double exact_expectation(const BoxSpec& box, double z,
                         const std::function<double(const RodConfig&)>& observable,
                         EnumerationLimits limits = {});

struct Transition {
  RodConfig next;
  double probability;
};

// One row of a Markov kernel: the full distribution of the next state.
using Kernel = std::function<std::vector<Transition>(const RodConfig&)>;

struct StationarityReport {
  double residual = 0.0;        // || pi P - pi ||_1
  double max_row_defect = 0.0;  // max_i |sum_j P_ij - 1|
  std::size_t states = 0;
};

// Builds the transition matrix of `kernel` over the enumerated states and
// measures how far the exact Gibbs vector is from being stationary.
StationarityReport exact_transition_check(const BoxSpec& box, double z, const Kernel& kernel,
                                          EnumerationLimits limits = {});

}  // namespace kmer
