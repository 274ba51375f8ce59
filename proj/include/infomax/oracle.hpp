#ifndef INFOMAX_ORACLE_HPP
#define INFOMAX_ORACLE_HPP

#include "infomax/core.hpp"

#include <cstdint>

namespace infomax {

struct OracleLimit {
  std::uint64_t max_combinations = 2'000'000;
};

struct OracleResult {
  IndexList selected;
  double objective = 0.0;
  std::uint64_t evaluated = 0;
};

/// C(n, p), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t p);

/// Exhaustive maximizer over all p-subsets in lexicographic order. Ties keep
/// the lexicographically smallest set. Throws CapacityError when C(n, p)
/// exceeds the limit.
OracleResult brute_force_optimum(const SelectionProblem& problem, const OracleLimit& limit = {});

}  // namespace infomax

#endif  // INFOMAX_ORACLE_HPP
