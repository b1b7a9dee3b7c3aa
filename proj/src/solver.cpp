#include "freshness/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "freshness/errors.hpp"

namespace freshness {

WaitingFunction::WaitingFunction(const ServiceTimeDist& dist, std::span<const Steps> waits) {
    const auto support = dist.support();
    if (waits.size() != support.size()) {
        throw ValidationError(
            fmt::format("waiting function has {} entries for a support of size {}", waits.size(), support.size()));
    }
    entries_.reserve(waits.size());
    for (std::size_t i = 0; i < waits.size(); ++i) {
        if (waits[i] < 0) {
            throw ValidationError(fmt::format("waiting time {} for service time {} is negative", waits[i], support[i].y));
        }
        entries_.push_back({support[i].y, waits[i]});
    }
}

WaitingFunction WaitingFunction::zero(const ServiceTimeDist& dist) {
    const std::vector<Steps> waits(dist.size(), 0);
    return WaitingFunction(dist, waits);
}

Steps WaitingFunction::at(Steps y) const {
    const auto it = std::find_if(entries_.begin(), entries_.end(), [y](const Entry& e) { return e.y == y; });
    if (it == entries_.end()) {
        throw ValidationError(fmt::format("waiting function is not defined at service time {}", y));
    }
    return it->wait;
}

Steps WaitingFunction::max_wait() const {
    Steps m = 0;
    for (const Entry& e : entries_) {
        m = std::max(m, e.wait);
    }
    return m;
}

bool WaitingFunction::matches(const ServiceTimeDist& dist) const {
    const auto support = dist.support();
    return std::equal(entries_.begin(), entries_.end(), support.begin(), support.end(),
                      [](const Entry& e, const ServiceTimeDist::Atom& a) { return e.y == a.y; });
}

std::string WaitingFunction::to_string() const {
    std::string out = "{";
    for (const Entry& e : entries_) {
        if (out.size() > 1) {
            out += ", ";
        }
        out += fmt::format("{}:{}", e.y, e.wait);
    }
    return out + "}";
}

Steps optimal_wait(const AgePenalty& penalty, const ServiceTimeDist& dist, Steps y_prev, double beta, Steps z_max) {
    if (!dist.contains(y_prev)) {
        throw ValidationError(fmt::format("previous service time {} is not in the support", y_prev));
    }
    if (z_max < 1) {
        throw ValidationError(fmt::format("z_max must be positive, got {}", z_max));
    }
    for (Steps n = 0; n <= z_max; ++n) {
        const double expected = dist.expect([&](Steps y_next) { return penalty.value(y_prev + n + y_next); });
        if (expected >= beta) {
            return n;
        }
    }
    throw ThresholdUnreachable(fmt::format(
        "expected penalty after service time {} stays below threshold {:.12g} for every wait up to z_max = {}; "
        "increase z_max, or the penalty is bounded above below the threshold",
        y_prev, beta, z_max));
}

WaitingFunction threshold_waiting(const AgePenalty& penalty, const ServiceTimeDist& dist, double beta, Steps z_max) {
    std::vector<Steps> waits;
    waits.reserve(dist.size());
    for (const auto& atom : dist.support()) {
        waits.push_back(optimal_wait(penalty, dist, atom.y, beta, z_max));
    }
    return WaitingFunction(dist, waits);
}

CycleStats cycle_stats(const AgePenalty& penalty, const ServiceTimeDist& dist, const WaitingFunction& waiting) {
    if (!waiting.matches(dist)) {
        throw ValidationError("waiting function is not defined on the distribution's support");
    }
    const auto support = dist.support();
    CycleStats stats;
    double expected_wait = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Steps y = support[i].y;
        const Steps z = waiting.entries()[i].wait;
        // The age runs through y, y+1, ..., y + z + y' - 1 before the next delivery.
        double partial = 0.0;
        Steps next = y;
        double conditional = 0.0;
        for (const auto& after : support) {
            const Steps last = y + z + after.y - 1;
            for (; next <= last; ++next) {
                const double p = penalty.value(next);
                if (!std::isfinite(p)) {
                    throw Error(fmt::format("penalty is not finite at age {}", next));
                }
                partial += p;
            }
            conditional += after.prob * partial;
        }
        stats.expected_reward += support[i].prob * conditional;
        expected_wait += support[i].prob * static_cast<double>(z);
    }
    stats.expected_length = dist.mean() + expected_wait;
    stats.ratio = stats.expected_reward / stats.expected_length;
    return stats;
}

namespace {

struct HValue {
    double h = 0.0;
    double scale = 0.0; // magnitude of the terms h was formed from
};

HValue evaluate_h(const AgePenalty& penalty, const ServiceTimeDist& dist, double c, Steps z_max) {
    const WaitingFunction waiting = threshold_waiting(penalty, dist, c, z_max);
    const CycleStats stats = cycle_stats(penalty, dist, waiting);
    const double cost = c * stats.expected_length;
    return {stats.expected_reward - cost, std::abs(stats.expected_reward) + std::abs(cost)};
}

} // namespace

double h_of_c(const AgePenalty& penalty, const ServiceTimeDist& dist, double c, Steps z_max) {
    return evaluate_h(penalty, dist, c, z_max).h;
}

SolverResult solve_beta(const AgePenalty& penalty, const ServiceTimeDist& dist, const SolverOptions& options) {
    if (!(options.tol > 0.0)) {
        throw ValidationError(fmt::format("solver tolerance must be positive, got {}", options.tol));
    }
    // Every age inside a cycle is at least y_min, so no policy averages below
    // p(y_min); the zero-wait policy is feasible, so the optimum is at most
    // its ratio.
    double lo = penalty.value(dist.min_y());
    double hi = cycle_stats(penalty, dist, WaitingFunction::zero(dist)).ratio;
    const double rounding = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
    if (hi < lo) {
        if (lo - hi > rounding) {
            throw BracketInvalid(fmt::format("zero-wait ratio {:.17g} lies below p(y_min) = {:.17g}", hi, lo));
        }
        hi = lo;
    }
    if (hi - lo <= rounding) {
        // Zero waiting already attains the lower bound (a penalty that is
        // constant over the reachable ages). Bisecting would probe c a few ulps
        // above every reachable penalty value.
        SolverResult result;
        result.beta = lo;
        result.waiting = WaitingFunction::zero(dist);
        result.h_residual = evaluate_h(penalty, dist, lo, options.z_max).h;
        return result;
    }
    const HValue at_lo = evaluate_h(penalty, dist, lo, options.z_max);
    if (at_lo.h < -1e-12 * (1.0 + at_lo.scale)) {
        throw BracketInvalid(fmt::format("h(p(y_min)) = {:.17g} is negative; penalty is not non-decreasing", at_lo.h));
    }
    const HValue at_hi = evaluate_h(penalty, dist, hi, options.z_max);
    if (at_hi.h > 1e-12 * (1.0 + at_hi.scale)) {
        throw BracketInvalid(fmt::format("h(zero-wait ratio) = {:.17g} is positive", at_hi.h));
    }

    SolverResult result;
    for (;;) {
        const double mid = std::midpoint(lo, hi);
        const double h = evaluate_h(penalty, dist, mid, options.z_max).h;
        ++result.iterations;
        result.beta = mid;
        result.h_residual = h;
        const bool converged = hi - lo <= options.tol && std::abs(h) <= options.tol;
        const bool stalled = mid == lo || mid == hi;
        if (converged || stalled || result.iterations >= options.max_iterations) {
            break;
        }
        if (h > 0.0) {
            lo = mid;
        } else if (h < 0.0) {
            hi = mid;
        } else {
            lo = hi = mid;
        }
    }
    result.waiting = threshold_waiting(penalty, dist, result.beta, options.z_max);
    return result;
}

SolverResult solve_mi(const MarkovSourceModel& model, const ServiceTimeDist& dist, const SolverOptions& options) {
    SolverResult result = solve_beta(AgePenalty::negated_mi(model), dist, options);
    result.beta = result.beta == 0.0 ? 0.0 : -result.beta;
    return result;
}

} // namespace freshness
