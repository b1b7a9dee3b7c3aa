#include "freshness/simulator.hpp"

#include <cmath>
#include <deque>
#include <ostream>

#include <fmt/format.h>

#include "freshness/csv.hpp"
#include "freshness/errors.hpp"
#include "freshness/parallel.hpp"

namespace freshness {

Steps uniform_period_for(const ServiceTimeDist& dist) {
    return std::max<Steps>(1, static_cast<Steps>(std::floor(dist.mean() + 0.5)));
}

std::string policy_name(const PolicySpec& policy) {
    return std::visit(detail::Overloaded{
                          [](const UniformPolicy& u) { return fmt::format("uniform(period={})", u.period); },
                          [](const ZeroWaitPolicy&) { return std::string("zero-wait"); },
                          [](const ThresholdPolicy& t) { return fmt::format("threshold(beta={:.12g})", t.beta); },
                      },
                      policy);
}

double metric_value(const Metric& metric, Steps age) {
    return std::visit(detail::Overloaded{
                          [age](const AgePenalty& p) { return p.value(age); },
                          [age](const MarkovSourceModel& m) { return m.mutual_information(age); },
                      },
                      metric);
}

namespace {

struct Sample {
    std::int64_t index = 0;
    Steps generated = 0;
    Steps service = 0;
    Steps started = 0;
};

// Memoized metric values by age; ages grow by at most one per step.
class MetricCache {
public:
    explicit MetricCache(const Metric& metric) : metric_(metric) {}

    double operator()(Steps age) {
        const auto idx = static_cast<std::size_t>(age);
        while (values_.size() <= idx) {
            values_.push_back(metric_value(metric_, static_cast<Steps>(values_.size())));
        }
        return values_[idx];
    }

private:
    const Metric& metric_;
    std::vector<double> values_;
};

class RandomServices {
public:
    RandomServices(const ServiceTimeDist& dist, std::uint64_t seed) : dist_(dist), rng_(seed) {}
    Steps next(std::int64_t /*index*/) { return dist_.sample(rng_); }

private:
    const ServiceTimeDist& dist_;
    Rng rng_;
};

class ForcedServices {
public:
    ForcedServices(const ServiceTimeDist& dist, std::span<const Steps> services) : services_(services) {
        for (std::size_t i = 0; i < services.size(); ++i) {
            if (!dist.contains(services[i])) {
                throw ValidationError(
                    fmt::format("forced service time {} (sample {}) is not in the support", services[i], i + 1));
            }
        }
    }
    Steps next(std::int64_t index) {
        const auto idx = static_cast<std::size_t>(index - 1);
        if (idx >= services_.size()) {
            throw SequenceExhausted(fmt::format("sample {} was generated but only {} service times were supplied",
                                                index, services_.size()));
        }
        return services_[idx];
    }

private:
    std::span<const Steps> services_;
};

template <class ServiceSource>
SimulationRun run(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                  ServiceSource& services, Steps horizon, Steps delta0, bool record_trace) {
    if (horizon < 1) {
        throw ValidationError(fmt::format("simulation horizon must be positive, got {}", horizon));
    }
    if (delta0 < 1) {
        throw ValidationError(fmt::format("initial age must be positive, got {}", delta0));
    }

    const auto* uniform = std::get_if<UniformPolicy>(&policy);
    if (uniform != nullptr && uniform->period < 1) {
        throw ValidationError(fmt::format("uniform period must be positive, got {}", uniform->period));
    }
    // Waiting after each delivery, by service time, for sample-at-idle policies.
    WaitingFunction waits = WaitingFunction::zero(dist);
    if (const auto* threshold = std::get_if<ThresholdPolicy>(&policy)) {
        waits = threshold_waiting(threshold->penalty, dist, threshold->beta, threshold->z_max);
    }

    SimulationRun result;
    SimulationTrace& trace = result.trace;
    trace.horizon = horizon;
    if (record_trace) {
        const auto rows = static_cast<std::size_t>(horizon) + 1;
        trace.age.reserve(rows);
        trace.metric.reserve(rows);
        trace.queue_length.reserve(rows);
        trace.freshest.reserve(rows);
    }

    MetricCache cache(metric);
    std::deque<Sample> queue;
    constexpr Steps kNone = -1;
    Sample in_service;
    bool busy = false;
    Steps freshest = kNone;        // U_n
    Steps next_generation = 0;     // kNone while waiting for a delivery
    std::int64_t generated = 0;
    std::int64_t delivered = 0;
    std::int64_t started = 0;
    double total_queue_wait = 0.0;
    double metric_sum = 0.0;

    auto log = [&](EventKind kind, std::int64_t sample, Steps n) {
        if (record_trace) {
            trace.events.push_back({kind, sample, n});
        }
    };

    for (Steps n = 0; n <= horizon; ++n) {
        if (busy && in_service.started + in_service.service == n) {
            freshest = in_service.generated;
            ++delivered;
            log(EventKind::delivered, in_service.index, n);
            if (uniform == nullptr) {
                next_generation = n + waits.at(in_service.service);
            }
            busy = false;
        }
        if (next_generation == n) {
            Sample sample;
            sample.index = ++generated;
            sample.generated = n;
            sample.service = services.next(sample.index);
            queue.push_back(sample);
            log(EventKind::generated, sample.index, n);
            if (uniform != nullptr) {
                next_generation = n + uniform->period;
            } else {
                next_generation = kNone;
            }
            if (static_cast<std::int64_t>(queue.size()) > kMaxQueuedSamples) {
                throw Error(fmt::format("more than {} samples queued at step {}; the policy overloads the server",
                                        kMaxQueuedSamples, n));
            }
        }
        if (!busy && !queue.empty()) {
            in_service = queue.front();
            queue.pop_front();
            busy = true;
            in_service.started = n;
            ++started;
            total_queue_wait += static_cast<double>(n - in_service.generated);
            log(EventKind::service_start, in_service.index, n);
        }

        const Steps age = freshest != kNone ? n - freshest : delta0 + n;
        const double value = cache(age);
        if (n >= 1) {
            metric_sum += value;
        }
        if (record_trace) {
            trace.age.push_back(age);
            trace.metric.push_back(value);
            trace.queue_length.push_back(static_cast<std::int64_t>(queue.size()) + (busy ? 1 : 0));
            trace.freshest.push_back(freshest);
        }
    }

    RunSummary& summary = result.summary;
    summary.time_average = metric_sum / static_cast<double>(horizon);
    summary.samples_generated = generated;
    summary.samples_delivered = delivered;
    summary.mean_queue_wait = started > 0 ? total_queue_wait / static_cast<double>(started) : 0.0;
    return result;
}

} // namespace

SimulationRun simulate(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                       const SimulationOptions& options) {
    RandomServices services(dist, options.seed);
    SimulationRun result = run(policy, metric, dist, services, options.horizon, options.delta0, options.record_trace);
    result.summary.seed = options.seed;
    return result;
}

SimulationRun replay(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                     std::span<const Steps> forced_services, Steps horizon, Steps delta0) {
    ForcedServices services(dist, forced_services);
    return run(policy, metric, dist, services, horizon, delta0, true);
}

Estimate estimate_time_average(const PolicySpec& policy, const Metric& metric, const ServiceTimeDist& dist,
                               Steps horizon, std::span<const std::uint64_t> seeds, Steps delta0,
                               std::size_t workers) {
    if (seeds.empty()) {
        throw ValidationError("at least one seed is required");
    }
    std::vector<double> averages(seeds.size());
    parallel_for(
        seeds.size(),
        [&](std::size_t i) {
            SimulationOptions options;
            options.horizon = horizon;
            options.seed = seeds[i];
            options.delta0 = delta0;
            options.record_trace = false;
            averages[i] = simulate(policy, metric, dist, options).summary.time_average;
        },
        workers);

    return estimate_from_samples(averages);
}

Estimate estimate_from_samples(std::span<const double> values) {
    if (values.empty()) {
        throw ValidationError("no replicate values to summarize");
    }
    Estimate estimate;
    for (double v : values) {
        estimate.mean += v;
    }
    const auto k = static_cast<double>(values.size());
    estimate.mean /= k;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - estimate.mean) * (v - estimate.mean);
        }
        estimate.std_error = std::sqrt(ss / (k - 1.0) / k);
    }
    return estimate;
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace) {
    out << "n,delta,metric,queue_len,event\n";
    std::size_t next_event = 0;
    for (std::size_t n = 0; n < trace.age.size(); ++n) {
        std::string deliver;
        std::string gen;
        std::string start;
        while (next_event < trace.events.size() && trace.events[next_event].time == static_cast<Steps>(n)) {
            const SampleEvent& e = trace.events[next_event++];
            switch (e.kind) {
            case EventKind::delivered:
                deliver = fmt::format("deliver:{}", e.sample);
                break;
            case EventKind::generated:
                gen = fmt::format("gen:{}", e.sample);
                break;
            case EventKind::service_start:
                start = fmt::format("start:{}", e.sample);
                break;
            }
        }
        std::string event;
        for (const std::string* part : {&deliver, &gen, &start}) {
            if (!part->empty()) {
                event += event.empty() ? *part : "|" + *part;
            }
        }
        out << n << ',' << trace.age[n] << ',' << format_real(trace.metric[n]) << ',' << trace.queue_length[n] << ','
            << event << '\n';
    }
}

void write_summary_csv(std::ostream& out, const RunSummary& summary) {
    out << "time_average,samples_generated,samples_delivered,mean_queue_wait,seed\n";
    out << format_real(summary.time_average) << ',' << summary.samples_generated << ',' << summary.samples_delivered
        << ',' << format_real(summary.mean_queue_wait) << ',' << summary.seed << '\n';
}

} // namespace freshness
