#include "freshness/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "freshness/errors.hpp"
#include "freshness/random.hpp"

namespace freshness {

double renewal_average(const AgePenalty& penalty, const ServiceTimeDist& dist, const WaitingFunction& waiting) {
    return cycle_stats(penalty, dist, waiting).ratio;
}

double zero_wait_average(const AgePenalty& penalty, const ServiceTimeDist& dist) {
    return renewal_average(penalty, dist, WaitingFunction::zero(dist));
}

OracleResult brute_force_optimum(const AgePenalty& penalty, const ServiceTimeDist& dist, Steps z_cap,
                                 std::uint64_t budget) {
    if (z_cap < 0) {
        throw ValidationError(fmt::format("oracle z_cap must be non-negative, got {}", z_cap));
    }
    const auto support = dist.support();
    const std::size_t k = support.size();
    const auto choices = static_cast<std::uint64_t>(z_cap) + 1;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < k; ++i) {
        if (total > budget / choices) {
            throw BudgetExceeded(fmt::format("{} waiting values over {} support points exceed the budget of {}",
                                             choices, k, budget));
        }
        total *= choices;
    }

    // E[q(y, z, Y')] for every (y, z). The cycle average of a candidate Z is
    // sum_y P(y) reward[y][Z(y)] / (E[Y] + sum_y P(y) Z(y)).
    std::vector<std::vector<double>> reward(k, std::vector<double>(choices, 0.0));
    for (std::size_t i = 0; i < k; ++i) {
        const Steps y = support[i].y;
        for (Steps z = 0; z <= z_cap; ++z) {
            double conditional = 0.0;
            for (const auto& after : support) {
                double sum = 0.0;
                for (Steps n = y; n <= y + z + after.y - 1; ++n) {
                    sum += penalty.value(n);
                }
                conditional += after.prob * sum;
            }
            reward[i][static_cast<std::size_t>(z)] = conditional;
        }
    }

    OracleResult result;
    result.best_ratio = std::numeric_limits<double>::infinity();
    std::vector<Steps> current(k, 0);
    std::vector<Steps> best(k, 0);
    for (std::uint64_t count = 0; count < total; ++count) {
        double num = 0.0;
        double den = dist.mean();
        for (std::size_t i = 0; i < k; ++i) {
            num += support[i].prob * reward[i][static_cast<std::size_t>(current[i])];
            den += support[i].prob * static_cast<double>(current[i]);
        }
        const double ratio = num / den;
        if (ratio < result.best_ratio - 1e-13 * std::max(1.0, std::abs(result.best_ratio)) ||
            count == 0) {
            result.best_ratio = ratio;
            best = current;
        }
        ++result.enumerated;
        // Odometer increment, last support point fastest.
        for (std::size_t i = k; i-- > 0;) {
            if (++current[i] <= z_cap) {
                break;
            }
            current[i] = 0;
        }
    }
    result.best_waiting = WaitingFunction(dist, best);
    return result;
}

OracleInstance random_oracle_instance(std::uint64_t seed, int index) {
    Rng rng(seed * 1'000'003ULL + static_cast<std::uint64_t>(index));
    const auto size = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
    std::vector<Steps> pool{1, 2, 3, 4, 5, 6};
    // Partial Fisher-Yates for distinct support points.
    for (std::size_t i = 0; i < size; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.next_u64() % (pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    // Half of the multi-point instances include y = 1: short services next
    // to long ones are where non-zero waits appear.
    if (size >= 2 && rng.uniform01() < 0.5 && std::find(pool.begin(), pool.begin() + size, 1) == pool.begin() + size) {
        pool[0] = 1;
    }
    std::vector<double> weights(size);
    double total = 0.0;
    for (double& w : weights) {
        w = 0.1 + rng.uniform01();
        total += w;
    }
    std::vector<ServiceTimeDist::Atom> atoms;
    double assigned = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        const double prob = i + 1 == size ? 1.0 - assigned : weights[i] / total;
        assigned += prob;
        atoms.push_back({pool[i], prob});
    }
    ServiceTimeDist dist = ServiceTimeDist::from_atoms(std::move(atoms));

    switch (index % 3) {
    case 0: {
        const double q = 0.05 + 0.4 * rng.uniform01();
        return {AgePenalty::negated_mi(MarkovSourceModel::binary_symmetric(q)), std::move(dist),
                fmt::format("binary q={:.6f}", q)};
    }
    case 1: {
        const double a = 0.3 + 0.65 * rng.uniform01();
        return {AgePenalty::negated_mi(MarkovSourceModel::gaussian_ar1(a, 1.0)), std::move(dist),
                fmt::format("gaussian a={:.6f}", a)};
    }
    default: {
        const double slope = 0.1 + 1.9 * rng.uniform01();
        const double intercept = -5.0 + 10.0 * rng.uniform01();
        return {AgePenalty::affine(slope, intercept), std::move(dist),
                fmt::format("affine slope={:.6f} intercept={:.6f}", slope, intercept)};
    }
    }
}

} // namespace freshness
