#pragma once

#include "ggc/composition.hpp"

namespace ggc {

/// Golden fixture: an instance, its composed solution, and the closed-form
/// sizes it must reproduce.
struct CatalogFixture {
  HypergraphInstance instance;
  ComposedResult composed;
  std::vector<double> expected_plus;
  std::vector<double> expected_minus;
  std::string description;
};

/// Single-query span program on H = C^2 deciding a per-input bit:
/// H(x) = span{e_bit}, K = {0}, w0 = e_1. Both witness sizes are exactly 1.
HyperedgeWithWitnesses single_query_edge(const std::vector<std::string>& domain,
                                         const std::vector<bool>& bit);

/// First index of a 1 in the input string; AllZeroInput on the all-zeros
/// string.
int first_marked_position(const std::vector<bool>& x);

/// Comb construction: spine edges alpha_j [x_j = 0], teeth beta_j [x_j = 1].
/// Domain: the strings 0^{i-1} 1 0^{n-i}. Expected sizes
/// R+ = sum_{j<i} alpha_j + beta_i, R- = sum_{j<i} 1/beta_j + 1/alpha_i.
CatalogFixture first_marked_index(int n, const std::vector<double>& alpha,
                                  const std::vector<double>& beta);

/// Complete binary tree learning a bit string; R+- = n on every input.
CatalogFixture dense_learning(int n);

/// Star of comparison paths for minimum finding. Inputs are permutations of
/// {0..n-1}; R+ = n and R- = H_{n-1} independent of the input.
CatalogFixture minimum_finding(int n, const std::vector<std::vector<int>>& inputs);

/// Default input sample for minimum_finding (identity, reverse, and a few
/// deterministic shuffles).
std::vector<std::vector<int>> minimum_finding_inputs(int n, int count = 4);

}  // namespace ggc
