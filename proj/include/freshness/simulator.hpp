#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "freshness/service.hpp"
#include "freshness/solver.hpp"
#include "freshness/sources.hpp"
#include "freshness/types.hpp"

namespace freshness {

/// Generate at n = 0, period, 2 period, ... whatever the server state;
/// samples that find the server busy wait in the FIFO queue.
struct UniformPolicy {
    Steps period = 1;
};

/// Generate the next sample the instant the previous one is delivered.
struct ZeroWaitPolicy {};

/// After delivering a sample with service time y, wait
/// optimal_wait(penalty, dist, y, beta, z_max) steps, then generate.
struct ThresholdPolicy {
    double beta = 0.0;
    AgePenalty penalty = AgePenalty::affine(1.0, 0.0);
    Steps z_max = 10'000;
};

using PolicySpec = std::variant<UniformPolicy, ZeroWaitPolicy, ThresholdPolicy>;

/// Threshold policy for the MI-maximization problem with optimal value beta_mi.
inline ThresholdPolicy mi_threshold_policy(const MarkovSourceModel& model, double beta_mi, Steps z_max = 10'000) {
    return {-beta_mi, AgePenalty::negated_mi(model), z_max};
}

/// round(E[Y]) with ties rounded up, at least 1.
Steps uniform_period_for(const ServiceTimeDist& dist);

std::string policy_name(const PolicySpec& policy);

/// What is averaged over time: an age penalty p(age), or the mutual
/// information r(age) of a source.
using Metric = std::variant<AgePenalty, MarkovSourceModel>;

double metric_value(const Metric& metric, Steps age);

enum class EventKind { generated, service_start, delivered };

struct SampleEvent {
    EventKind kind = EventKind::generated;
    std::int64_t sample = 0; // 1-based
    Steps time = 0;
    bool operator==(const SampleEvent&) const = default;
};

/// Per-step record for n = 0..horizon (index n). Row 0 holds the initial
/// state and the events at time 0; averages use rows 1..horizon.
struct SimulationTrace {
    Steps horizon = 0;
    std::vector<Steps> age;
    std::vector<double> metric;
    std::vector<std::int64_t> queue_length; // samples in system after step n
    std::vector<Steps> freshest;            // U_n, or -1 before the first delivery
    std::vector<SampleEvent> events;        // in time order

    bool operator==(const SimulationTrace&) const = default;
};

struct RunSummary {
    double time_average = 0.0;
    std::int64_t samples_generated = 0;
    std::int64_t samples_delivered = 0;
    double mean_queue_wait = 0.0; // mean of (service start - generation) over served samples
    std::uint64_t seed = 0;

    bool operator==(const RunSummary&) const = default;
};

struct SimulationRun {
    SimulationTrace trace;
    RunSummary summary;
};

struct SimulationOptions {
    Steps horizon = 1;
    std::uint64_t seed = 0;
    Steps delta0 = 1;
    bool record_trace = true;
};

/// Hard limit on samples waiting in the queue; exceeding it aborts the run.
inline constexpr std::int64_t kMaxQueuedSamples = 1'000'000;

/// Discrete-time FIFO single-server queue fed by the sampling policy.
///
/// At each step n = 0..horizon, in order: a sample whose service finishes at
/// n is delivered; a sample due at n is generated with its service time drawn
/// from dist; an idle server starts the head of the queue. The age is
/// n - (generation time of the freshest delivered sample), or delta0 + n
/// before the first delivery. Deterministic given the seed.
SimulationRun simulate(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                       const SimulationOptions& options);

/// Same as simulate, but sample i takes forced_services[i - 1] instead of a
/// random draw. Throws SequenceExhausted when a sample beyond the list is
/// generated.
SimulationRun replay(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                     std::span<const Steps> forced_services, Steps horizon, Steps delta0 = 1);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean and standard error of independent replicate values (std_error = 0
/// for a single value).
Estimate estimate_from_samples(std::span<const double> values);

/// Across-seed mean and standard error of the time average (summary-only
/// runs, executed in parallel; one seed gives std_error = 0).
Estimate estimate_time_average(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                               Steps horizon, std::span<const std::uint64_t> seeds, Steps delta0 = 1,
                               std::size_t workers = 0);

/// CSV with header n,delta,metric,queue_len,event. Events at one step are
/// joined with '|' in the order deliver, gen, start.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace);

/// CSV header and one row for a RunSummary.
void write_summary_csv(std::ostream& out, const RunSummary& summary);

} // namespace freshness
