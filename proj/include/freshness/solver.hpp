#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freshness/service.hpp"
#include "freshness/sources.hpp"
#include "freshness/types.hpp"

namespace freshness {

/// Deterministic stationary waiting rule y -> Z(y): after a sample with
/// service time y is delivered, wait Z(y) steps before taking the next one.
/// Defined on exactly the support of one ServiceTimeDist.
class WaitingFunction {
public:
    struct Entry {
        Steps y = 1;
        Steps wait = 0;
        bool operator==(const Entry&) const = default;
    };

    WaitingFunction() = default;

    /// Waits listed in the order of dist.support().
    WaitingFunction(const ServiceTimeDist& dist, std::span<const Steps> waits);

    static WaitingFunction zero(const ServiceTimeDist& dist);

    /// Throws ValidationError for a y outside the support.
    Steps at(Steps y) const;

    std::span<const Entry> entries() const { return entries_; }
    Steps max_wait() const;

    /// True when the function is defined on exactly dist's support.
    bool matches(const ServiceTimeDist& dist) const;

    std::string to_string() const;

    bool operator==(const WaitingFunction&) const = default;

private:
    std::vector<Entry> entries_;
};

/// One delivery-to-delivery renewal cycle of a sample-at-idle policy.
struct CycleStats {
    double expected_reward = 0.0; // E[q(Y, Z(Y), Y')]
    double expected_length = 0.0; // E[Z(Y) + Y']
    double ratio = 0.0;
};

struct SolverOptions {
    double tol = 1e-10;
    Steps z_max = 10'000;
    int max_iterations = 400;
};

struct SolverResult {
    /// Optimal time-average penalty (or, from solve_mi, optimal time-average
    /// mutual information).
    double beta = 0.0;
    WaitingFunction waiting;
    double h_residual = 0.0;
    int iterations = 0;
};

/// Smallest n >= 0 with E[p(y_prev + n + Y')] >= beta.
/// Throws ThresholdUnreachable if no n <= z_max qualifies.
Steps optimal_wait(const AgePenalty& penalty, const ServiceTimeDist& dist, Steps y_prev, double beta, Steps z_max);

/// Z(y; beta) for every support point.
WaitingFunction threshold_waiting(const AgePenalty& penalty, const ServiceTimeDist& dist, double beta, Steps z_max);

/// Exact expected cycle reward and length for an arbitrary waiting function.
CycleStats cycle_stats(const AgePenalty& penalty, const ServiceTimeDist& dist, const WaitingFunction& waiting);

/// h(c) = min over waiting functions of E[q(Y, Z, Y')] - c E[Z + Y'].
/// The minimizer is the per-y threshold rule at level c.
double h_of_c(const AgePenalty& penalty, const ServiceTimeDist& dist, double c, Steps z_max);

/// Bisection on h over [p(y_min), zero-wait ratio]; h is non-increasing and
/// crosses zero exactly at the optimal time-average penalty.
SolverResult solve_beta(const AgePenalty& penalty, const ServiceTimeDist& dist, const SolverOptions& options = {});

/// Maximizes the time-average mutual information of a Markov source by
/// solving the penalty problem with p = -r. The returned beta is the optimal
/// average information; the waiting rule is "wait until
/// E[r(y_prev + n + Y')] <= beta".
SolverResult solve_mi(const MarkovSourceModel& model, const ServiceTimeDist& dist, const SolverOptions& options = {});

} // namespace freshness
