#include "freshness/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "freshness/errors.hpp"
#include "freshness/random.hpp"

namespace freshness {
namespace {

using detail::Overloaded;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_age(Steps delta) {
    if (delta < 0) {
        throw ValidationError(fmt::format("age must be non-negative, got {}", delta));
    }
}

// 1 - h((1 - eps) / 2) for eps in [0, 1], written in terms of eps so that
// the result keeps full relative precision as eps -> 0.
double binary_information(double eps) {
    if (eps >= 1.0) {
        return 1.0;
    }
    if (eps <= 0.0) {
        return 0.0;
    }
    if (eps < 0.125) {
        // sum_k eps^(2k) / (k (2k - 1)) / (2 ln 2)
        const double e2 = eps * eps;
        double term = e2;
        double sum = 0.0;
        for (int k = 1; k < 40; ++k) {
            const double add = term / (k * (2.0 * k - 1.0));
            sum += add;
            if (add < sum * 1e-18) {
                break;
            }
            term *= e2;
        }
        return sum / (2.0 * std::numbers::ln2);
    }
    return ((1.0 + eps) * std::log1p(eps) + (1.0 - eps) * std::log1p(-eps)) /
           (2.0 * std::numbers::ln2);
}

} // namespace

MarkovSourceModel MarkovSourceModel::gaussian_ar1(double a, double sigma2) {
    if (!(a > -1.0 && a < 1.0)) {
        throw ValidationError(fmt::format("gaussian AR(1) coefficient a must lie in (-1, 1), got {}", a));
    }
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw ValidationError(fmt::format("gaussian AR(1) noise variance must be positive, got {}", sigma2));
    }
    return MarkovSourceModel(GaussianAR1{a, sigma2});
}

MarkovSourceModel MarkovSourceModel::binary_symmetric(double q) {
    if (!(q >= 0.0 && q <= 0.5)) {
        throw ValidationError(fmt::format("binary flip probability q must lie in [0, 0.5], got {}", q));
    }
    return MarkovSourceModel(BinarySymmetric{q});
}

MarkovSourceModel MarkovSourceModel::tabulated(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("tabulated mutual-information curve is empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i]) || values[i] < 0.0) {
            throw ValidationError(fmt::format("tabulated curve value r({}) = {} is not non-negative", i, values[i]));
        }
        if (i > 0 && values[i] > values[i - 1]) {
            throw ValidationError(fmt::format("tabulated curve increases at r({}) = {} > r({}) = {}", i,
                                              values[i], i - 1, values[i - 1]));
        }
    }
    return MarkovSourceModel(TabulatedCurve{std::move(values)});
}

double MarkovSourceModel::mutual_information(Steps delta) const {
    require_age(delta);
    return std::visit(
        Overloaded{
            [delta](const GaussianAR1& g) {
                if (delta == 0) {
                    return kInf;
                }
                const double rho = std::pow(g.a * g.a, static_cast<double>(delta));
                return -0.5 * std::log1p(-rho) / std::numbers::ln2;
            },
            [delta](const BinarySymmetric& b) {
                const double eps = std::pow(1.0 - 2.0 * b.q, static_cast<double>(delta));
                return binary_information(eps);
            },
            [delta](const TabulatedCurve& t) {
                const auto idx = static_cast<std::size_t>(delta);
                return idx < t.values.size() ? t.values[idx] : 0.0;
            },
        },
        params_);
}

std::string MarkovSourceModel::describe() const {
    return std::visit(Overloaded{
                          [](const GaussianAR1& g) { return fmt::format("gaussian(a={}, sigma2={})", g.a, g.sigma2); },
                          [](const BinarySymmetric& b) { return fmt::format("binary(q={})", b.q); },
                          [](const TabulatedCurve& t) { return fmt::format("tabulated({} values)", t.values.size()); },
                      },
                      params_);
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError(fmt::format("binary entropy argument must lie in [0, 1], got {}", x));
    }
    double h = 0.0;
    if (x > 0.0) {
        h -= x * std::log2(x);
    }
    if (x < 1.0) {
        h -= (1.0 - x) * std::log2(1.0 - x);
    }
    return h;
}

AgePenalty AgePenalty::negated_mi(MarkovSourceModel model) {
    return AgePenalty(NegatedMI{std::move(model)});
}

AgePenalty AgePenalty::table(std::vector<double> values) {
    if (values.empty()) {
        throw ValidationError("penalty table is empty");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw ValidationError(fmt::format("penalty table entry p({}) is not finite", i));
        }
        if (i > 0 && values[i] < values[i - 1]) {
            throw ValidationError(fmt::format("penalty table decreases at p({}) = {} < p({}) = {}", i, values[i],
                                              i - 1, values[i - 1]));
        }
    }
    return AgePenalty(TablePenalty{std::move(values)});
}

AgePenalty AgePenalty::affine(double slope, double intercept) {
    if (!(slope >= 0.0) || !std::isfinite(slope)) {
        throw ValidationError(fmt::format("affine penalty slope must be finite and non-negative, got {}", slope));
    }
    if (!std::isfinite(intercept)) {
        throw ValidationError("affine penalty intercept must be finite");
    }
    return AgePenalty(AffinePenalty{slope, intercept});
}

double AgePenalty::value(Steps delta) const {
    require_age(delta);
    return std::visit(Overloaded{
                          [delta](const NegatedMI& m) { return -m.model.mutual_information(delta); },
                          [delta](const TablePenalty& t) {
                              const auto idx = std::min(static_cast<std::size_t>(delta), t.values.size() - 1);
                              return t.values[idx];
                          },
                          [delta](const AffinePenalty& a) {
                              return a.slope * static_cast<double>(delta) + a.intercept;
                          },
                      },
                      params_);
}

std::string AgePenalty::describe() const {
    return std::visit(Overloaded{
                          [](const NegatedMI& m) { return fmt::format("negated-mi[{}]", m.model.describe()); },
                          [](const TablePenalty& t) { return fmt::format("table({} values)", t.values.size()); },
                          [](const AffinePenalty& a) {
                              return fmt::format("affine(slope={}, intercept={})", a.slope, a.intercept);
                          },
                      },
                      params_);
}

std::vector<double> sample_source_path(const MarkovSourceModel& model, Steps horizon, std::uint64_t seed) {
    if (horizon < 1) {
        throw ValidationError(fmt::format("source path horizon must be positive, got {}", horizon));
    }
    Rng rng(seed);
    std::vector<double> path;
    path.reserve(static_cast<std::size_t>(horizon));
    std::visit(Overloaded{
                   [&](const GaussianAR1& g) {
                       const double noise_sd = std::sqrt(g.sigma2);
                       double x = rng.standard_normal() * std::sqrt(g.sigma2 / (1.0 - g.a * g.a));
                       path.push_back(x);
                       for (Steps n = 1; n < horizon; ++n) {
                           x = g.a * x + noise_sd * rng.standard_normal();
                           path.push_back(x);
                       }
                   },
                   [&](const BinarySymmetric& b) {
                       bool x = rng.uniform01() < 0.5;
                       path.push_back(x ? 1.0 : 0.0);
                       for (Steps n = 1; n < horizon; ++n) {
                           x = x != (rng.uniform01() < b.q);
                           path.push_back(x ? 1.0 : 0.0);
                       }
                   },
                   [](const TabulatedCurve&) {
                       throw ValidationError("a tabulated curve has no generative source model");
                   },
               },
               model.params());
    return path;
}

} // namespace freshness
