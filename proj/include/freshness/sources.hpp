#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "freshness/types.hpp"

namespace freshness {

/// X_n = a X_{n-1} + W_n with W_n ~ N(0, sigma2) i.i.d.
struct GaussianAR1 {
    double a = 0.0;
    double sigma2 = 1.0;
    bool operator==(const GaussianAR1&) const = default;
};

/// X_n = X_{n-1} xor V_n with V_n ~ Bernoulli(q) i.i.d.
struct BinarySymmetric {
    double q = 0.0;
    bool operator==(const BinarySymmetric&) const = default;
};

/// An explicit mutual-information curve r(0), ..., r(delta_max) in bits.
/// Ages past the table read as 0.
struct TabulatedCurve {
    std::vector<double> values;
    bool operator==(const TabulatedCurve&) const = default;
};

/// A time-homogeneous Markov source, identified by the curve r(delta) of
/// mutual information between X_n and the freshest delivered sample
/// X_{n - delta}. Parameters are validated on construction.
class MarkovSourceModel {
public:
    using Params = std::variant<GaussianAR1, BinarySymmetric, TabulatedCurve>;

    static MarkovSourceModel gaussian_ar1(double a, double sigma2);
    static MarkovSourceModel binary_symmetric(double q);
    static MarkovSourceModel tabulated(std::vector<double> values);

    const Params& params() const { return params_; }

    /// r(delta) in bits. +infinity for a Gaussian source at delta = 0.
    double mutual_information(Steps delta) const;

    std::string describe() const;

    bool operator==(const MarkovSourceModel&) const = default;

private:
    explicit MarkovSourceModel(Params params) : params_(std::move(params)) {}
    Params params_;
};

inline double mutual_information(const MarkovSourceModel& model, Steps delta) {
    return model.mutual_information(delta);
}

/// h(x) = -x log2 x - (1-x) log2 (1-x), with 0 log 0 = 0.
/// Throws ValidationError outside [0, 1].
double binary_entropy(double x);

/// p(delta) = slope * delta + intercept.
struct AffinePenalty {
    double slope = 1.0;
    double intercept = 0.0;
    bool operator==(const AffinePenalty&) const = default;
};

/// Non-decreasing table p(0), p(1), ...; held at the last value beyond it.
struct TablePenalty {
    std::vector<double> values;
    bool operator==(const TablePenalty&) const = default;
};

/// p(delta) = -r(delta).
struct NegatedMI {
    MarkovSourceModel model;
    bool operator==(const NegatedMI&) const = default;
};

/// A non-decreasing age penalty function p(delta).
class AgePenalty {
public:
    using Params = std::variant<NegatedMI, TablePenalty, AffinePenalty>;

    static AgePenalty negated_mi(MarkovSourceModel model);
    static AgePenalty table(std::vector<double> values);
    static AgePenalty affine(double slope, double intercept);
    static AgePenalty constant(double value) { return affine(0.0, value); }

    const Params& params() const { return params_; }

    double value(Steps delta) const;

    std::string describe() const;

    bool operator==(const AgePenalty&) const = default;

private:
    explicit AgePenalty(Params params) : params_(std::move(params)) {}
    Params params_;
};

inline double penalty_value(const AgePenalty& penalty, Steps delta) {
    return penalty.value(delta);
}

/// Realized source path X_0, ..., X_{horizon-1}. X_0 is drawn from the
/// stationary law (fair bit, or N(0, sigma2 / (1 - a^2))). Binary states are
/// emitted as 0.0 / 1.0. Tabulated curves have no generative model and are
/// rejected.
std::vector<double> sample_source_path(const MarkovSourceModel& model, Steps horizon,
                                       std::uint64_t seed);

} // namespace freshness
