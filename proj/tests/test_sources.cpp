#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "freshness/errors.hpp"
#include "freshness/sources.hpp"
#include "oracle/reference.hpp"

using namespace freshness;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// Expected values below were evaluated with 40-digit mpmath
// (tests/oracle/gen_goldens.py).

TEST(MutualInformation, GaussianAtZeroAgeIsInfinite) {
    const auto model = MarkovSourceModel::gaussian_ar1(0.9, 1.0);
    EXPECT_EQ(mutual_information(model, 0), kInf);
}

TEST(MutualInformation, FairFlipsCarryNoInformation) {
    const auto model = MarkovSourceModel::binary_symmetric(0.5);
    EXPECT_EQ(mutual_information(model, 1), 0.0);
    EXPECT_EQ(mutual_information(model, 0), 1.0);
}

TEST(MutualInformation, BinaryClosedForm) {
    const auto model = MarkovSourceModel::binary_symmetric(0.25);
    EXPECT_NEAR(mutual_information(model, 1), 0.18872187554086713609, 1e-15);
}

TEST(MutualInformation, GaussianClosedForm) {
    const auto model = MarkovSourceModel::gaussian_ar1(0.5, 2.0);
    EXPECT_NEAR(mutual_information(model, 1), 0.20751874963942190927, 1e-15);
}

TEST(MutualInformation, NoiselessBinarySourceKeepsOneBit) {
    const auto model = MarkovSourceModel::binary_symmetric(0.0);
    for (Steps d : {0, 1, 10, 1000}) {
        EXPECT_EQ(mutual_information(model, d), 1.0);
    }
}

TEST(MutualInformation, BinaryMatchesNaiveEntropyForm) {
    // The library evaluates 1 - h(x) through a cancellation-free expansion;
    // away from tiny values both routes must agree.
    for (double q : {0.01, 0.05, 0.1, 0.2, 0.3, 0.44, 0.45}) {
        const auto model = MarkovSourceModel::binary_symmetric(q);
        for (Steps d = 1; d <= 60; ++d) {
            const double naive = reference::binary_mi(q, d);
            if (naive < 1e-6) break;
            EXPECT_NEAR(model.mutual_information(d), naive, 1e-12 + 1e-9 * naive) << "q=" << q << " d=" << d;
        }
    }
}

TEST(MutualInformation, TabulatedCurveReadsZeroPastTable) {
    const auto model = MarkovSourceModel::tabulated({2.0, 1.0, 0.5});
    EXPECT_EQ(model.mutual_information(2), 0.5);
    EXPECT_EQ(model.mutual_information(3), 0.0);
    EXPECT_EQ(model.mutual_information(100), 0.0);
}

TEST(MutualInformation, RejectsInvalidModels) {
    EXPECT_THROW(MarkovSourceModel::gaussian_ar1(1.0, 1.0), ValidationError);
    EXPECT_THROW(MarkovSourceModel::gaussian_ar1(-1.0, 1.0), ValidationError);
    EXPECT_THROW(MarkovSourceModel::gaussian_ar1(0.5, 0.0), ValidationError);
    EXPECT_THROW(MarkovSourceModel::binary_symmetric(0.51), ValidationError);
    EXPECT_THROW(MarkovSourceModel::binary_symmetric(-0.01), ValidationError);
    EXPECT_THROW(MarkovSourceModel::tabulated({}), ValidationError);
    EXPECT_THROW(MarkovSourceModel::tabulated({1.0, 1.5}), ValidationError);
    EXPECT_THROW(MarkovSourceModel::tabulated({1.0, -0.1}), ValidationError);
    EXPECT_THROW(MarkovSourceModel::binary_symmetric(0.2).mutual_information(-1), ValidationError);
}

TEST(MutualInformation, NonNegativeAndNonIncreasingInAge) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const MarkovSourceModel model = trial % 2 == 0
                                            ? MarkovSourceModel::binary_symmetric(0.5 * unit(gen))
                                            : MarkovSourceModel::gaussian_ar1(-0.999 + 1.998 * unit(gen), 1.0);
        double previous = model.mutual_information(0);
        for (Steps d = 1; d <= 200; ++d) {
            const double current = model.mutual_information(d);
            ASSERT_GE(current, 0.0) << model.describe() << " d=" << d;
            ASSERT_LE(current, previous) << model.describe() << " d=" << d;
            previous = current;
        }
    }
}

TEST(MutualInformation, BinaryForgetsEventually) {
    for (double q = 0.05; q <= 0.5; q += 0.05) {
        EXPECT_LT(MarkovSourceModel::binary_symmetric(q).mutual_information(500), 1e-6) << q;
    }
}

TEST(BinaryEntropy, Endpoints) {
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_EQ(binary_entropy(0.5), 1.0);
    EXPECT_NEAR(binary_entropy(0.25), 0.81127812445913286391, 1e-15);
}

TEST(BinaryEntropy, RejectsOutOfRange) {
    EXPECT_THROW(binary_entropy(-1e-9), ValidationError);
    EXPECT_THROW(binary_entropy(1.0 + 1e-9), ValidationError);
    EXPECT_THROW(binary_entropy(std::nan("")), ValidationError);
}

TEST(BinaryEntropy, Symmetric) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = unit(gen);
        EXPECT_NEAR(binary_entropy(x), binary_entropy(1.0 - x), 1e-15);
    }
}

TEST(PenaltyValue, Examples) {
    EXPECT_EQ(penalty_value(AgePenalty::negated_mi(MarkovSourceModel::binary_symmetric(0.5)), 3), 0.0);
    EXPECT_EQ(penalty_value(AgePenalty::affine(1.0, 0.0), 7), 7.0);
    EXPECT_NEAR(penalty_value(AgePenalty::negated_mi(MarkovSourceModel::binary_symmetric(0.25)), 1),
                -0.18872187554086713609, 1e-15);
    EXPECT_EQ(penalty_value(AgePenalty::negated_mi(MarkovSourceModel::gaussian_ar1(0.3, 1.0)), 0), -kInf);
}

TEST(PenaltyValue, TableHoldsLastValue) {
    const auto p = AgePenalty::table({-3.0, -1.0, 2.0});
    EXPECT_EQ(p.value(0), -3.0);
    EXPECT_EQ(p.value(2), 2.0);
    EXPECT_EQ(p.value(50), 2.0);
    EXPECT_THROW(AgePenalty::table({1.0, 0.0}), ValidationError);
    EXPECT_THROW(AgePenalty::affine(-0.1, 0.0), ValidationError);
}

TEST(PenaltyValue, NegatedMiIsNonDecreasing) {
    for (const auto& model : {MarkovSourceModel::binary_symmetric(0.07), MarkovSourceModel::gaussian_ar1(-0.8, 1.0),
                              MarkovSourceModel::tabulated({3.0, 2.0, 2.0, 0.1})}) {
        const auto p = AgePenalty::negated_mi(model);
        for (Steps d = 0; d < 100; ++d) {
            EXPECT_LE(p.value(d), p.value(d + 1)) << model.describe() << " d=" << d;
        }
    }
}

TEST(SourcePath, NoiselessBinaryIsConstant) {
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        const auto path = sample_source_path(MarkovSourceModel::binary_symmetric(0.0), 5, seed);
        ASSERT_EQ(path.size(), 5u);
        for (double x : path) {
            EXPECT_EQ(x, path.front());
        }
    }
}

TEST(SourcePath, WhiteGaussianIsStandardNormal) {
    const auto path = sample_source_path(MarkovSourceModel::gaussian_ar1(0.0, 1.0), 200'000, 3);
    const double n = static_cast<double>(path.size());
    const double mean = std::accumulate(path.begin(), path.end(), 0.0) / n;
    double var = 0.0;
    double lag1 = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        var += (path[i] - mean) * (path[i] - mean);
        if (i > 0) lag1 += (path[i] - mean) * (path[i - 1] - mean);
    }
    var /= n;
    lag1 /= n * var;
    // 5 sigma bounds for n = 2e5.
    EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(lag1, 0.0, 5.0 / std::sqrt(n));
}

TEST(SourcePath, BinaryFlipRateMatchesQ) {
    const auto path = sample_source_path(MarkovSourceModel::binary_symmetric(0.2), 100'000, 5);
    int flips = 0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        ASSERT_TRUE(path[i] == 0.0 || path[i] == 1.0);
        flips += path[i] != path[i - 1] ? 1 : 0;
    }
    const double n = static_cast<double>(path.size() - 1);
    EXPECT_NEAR(flips / n, 0.2, 5.0 * std::sqrt(0.2 * 0.8 / n));
}

TEST(SourcePath, ReplaysFromSeed) {
    const auto model = MarkovSourceModel::gaussian_ar1(0.7, 2.0);
    EXPECT_EQ(sample_source_path(model, 1000, 42), sample_source_path(model, 1000, 42));
    EXPECT_NE(sample_source_path(model, 1000, 42), sample_source_path(model, 1000, 43));
}

TEST(SourcePath, RejectsBadArguments) {
    EXPECT_THROW(sample_source_path(MarkovSourceModel::binary_symmetric(0.1), 0, 1), ValidationError);
    EXPECT_THROW(sample_source_path(MarkovSourceModel::tabulated({1.0}), 10, 1), ValidationError);
}
