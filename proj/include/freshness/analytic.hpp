#pragma once

#include <cstdint>
#include <string>

#include "freshness/service.hpp"
#include "freshness/solver.hpp"
#include "freshness/sources.hpp"

namespace freshness {

// Renewal-reward evaluation of sample-at-idle policies. Deliveries are
// regeneration points, so the long-run average of p(age) is the expected
// cycle reward over the expected cycle length.

/// Exact long-run time average of p(age) under a stationary waiting function.
double renewal_average(const AgePenalty& penalty, const ServiceTimeDist& dist, const WaitingFunction& waiting);

/// renewal_average with Z = 0: sample the instant the previous one is delivered.
double zero_wait_average(const AgePenalty& penalty, const ServiceTimeDist& dist);

struct OracleResult {
    double best_ratio = 0.0;
    WaitingFunction best_waiting;
    std::uint64_t enumerated = 0;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

/// Evaluates every deterministic waiting function Z: support -> {0..z_cap}
/// and returns the one with the smallest long-run average penalty. Candidates
/// are visited in lexicographic order of (Z(y_1), Z(y_2), ...) and a later
/// candidate only replaces the incumbent when it is better by more than
/// a relative 1e-13, so near-ties resolve toward the lexicographically
/// smallest function.
///
/// Stationary deterministic rules contain an optimum of the full causal
/// policy class (given i.i.d. service times the previous service time is a
/// sufficient statistic for the next wait), which makes this an exact
/// ground truth whenever the optimum lies inside the cap.
///
/// Throws BudgetExceeded if (z_cap + 1)^|support| > budget.
OracleResult brute_force_optimum(const AgePenalty& penalty, const ServiceTimeDist& dist, Steps z_cap,
                                 std::uint64_t budget = kDefaultEnumerationBudget);

/// A randomized solver-vs-oracle test case.
struct OracleInstance {
    AgePenalty penalty;
    ServiceTimeDist dist;
    std::string label;
};

/// Instance `index` of the randomized suite rooted at `seed`: support of 1-3
/// points drawn from {1..6}, penalty kind cycling through negated binary MI
/// (q in [0.05, 0.45]), negated Gaussian MI (a in [0.3, 0.95]) and affine.
OracleInstance random_oracle_instance(std::uint64_t seed, int index);

} // namespace freshness
