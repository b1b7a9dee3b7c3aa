#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "freshness/errors.hpp"
#include "freshness/service.hpp"
#include "freshness/sources.hpp"

using namespace freshness;

TEST(ServiceTimeDist, Mean) {
    EXPECT_EQ(ServiceTimeDist::parse("1:0.5, 5:0.5").mean(), 3.0);
    EXPECT_EQ(ServiceTimeDist::parse("1:0.5, 11:0.5").mean(), 6.0);
    EXPECT_EQ(ServiceTimeDist::deterministic(4).mean(), 4.0);
}

TEST(ServiceTimeDist, SortsSupport) {
    const auto dist = ServiceTimeDist::parse("11:0.25 3:0.5, 1:0.25");
    ASSERT_EQ(dist.size(), 3u);
    EXPECT_EQ(dist.min_y(), 1);
    EXPECT_EQ(dist.max_y(), 11);
    EXPECT_EQ(dist.support()[1].y, 3);
    EXPECT_TRUE(dist.contains(3));
    EXPECT_FALSE(dist.contains(2));
}

TEST(ServiceTimeDist, RejectsInvalidSupports) {
    EXPECT_THROW(ServiceTimeDist::from_atoms({}), ValidationError);
    EXPECT_THROW(ServiceTimeDist::from_atoms({{0, 1.0}}), ValidationError);
    EXPECT_THROW(ServiceTimeDist::from_atoms({{2, 0.5}, {2, 0.5}}), ValidationError);
    EXPECT_THROW(ServiceTimeDist::from_atoms({{1, 0.5}, {2, 0.4}}), ValidationError);
    EXPECT_THROW(ServiceTimeDist::from_atoms({{1, 0.0}, {2, 1.0}}), ValidationError);
    EXPECT_THROW(ServiceTimeDist::parse("1-0.5"), ValidationError);
    EXPECT_THROW(ServiceTimeDist::parse("x:1"), ValidationError);
    EXPECT_THROW(ServiceTimeDist::parse("1:abc"), ValidationError);
}

TEST(ServiceTimeDist, AcceptsRoundingInTotal) {
    const auto dist = ServiceTimeDist::from_atoms({{1, 0.1}, {2, 0.2}, {3, 0.7 + 5e-13}});
    double total = 0.0;
    for (const auto& atom : dist.support()) total += atom.prob;
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Expect, Examples) {
    const auto two_point = ServiceTimeDist::parse("1:0.5, 5:0.5");
    EXPECT_EQ(two_point.expect([](Steps y) { return static_cast<double>(y); }), 3.0);
    EXPECT_EQ(ServiceTimeDist::deterministic(2).expect([](Steps y) { return static_cast<double>(y * y); }), 4.0);

    // 0.5 r(1) + 0.5 r(11) for q = 0.1, from the mpmath oracle.
    const auto model = MarkovSourceModel::binary_symmetric(0.1);
    const auto dist = ServiceTimeDist::parse("1:0.5, 11:0.5");
    EXPECT_NEAR(dist.expect([&](Steps y) { return model.mutual_information(y); }), 0.2681667883475160797, 1e-15);
}

TEST(Expect, InfinityAbsorbs) {
    const auto dist = ServiceTimeDist::parse("1:0.9, 2:0.1");
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(dist.expect([&](Steps y) { return y == 2 ? inf : 1.0; }), inf);
}

TEST(Expect, ConstantAndLinear) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ServiceTimeDist::Atom> atoms;
        double total = 0.0;
        const int k = 1 + trial % 5;
        for (int i = 0; i < k; ++i) {
            atoms.push_back({i * 3 + 1, 0.1 + unit(gen)});
            total += atoms.back().prob;
        }
        for (auto& atom : atoms) atom.prob /= total;
        const auto dist = ServiceTimeDist::from_atoms(atoms);
        const double c = -5.0 + 10.0 * unit(gen);
        EXPECT_NEAR(dist.expect([c](Steps) { return c; }), c, 1e-12);

        const double a = unit(gen);
        const double b = unit(gen);
        auto f = [a](Steps y) { return a * std::sqrt(static_cast<double>(y)); };
        auto g = [b](Steps y) { return b * std::log(static_cast<double>(y) + 1.0); };
        EXPECT_NEAR(dist.expect([&](Steps y) { return f(y) + g(y); }), dist.expect(f) + dist.expect(g), 1e-12);
    }
}

TEST(Sample, PointMass) {
    const auto dist = ServiceTimeDist::deterministic(7);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_EQ(dist.sample(rng), 7);
    }
}

TEST(Sample, EmpiricalFrequency) {
    const auto dist = ServiceTimeDist::parse("1:0.5, 5:0.5");
    Rng rng(2024);
    const int draws = 1'000'000;
    int ones = 0;
    for (int i = 0; i < draws; ++i) {
        const Steps y = dist.sample(rng);
        ASSERT_TRUE(y == 1 || y == 5);
        ones += y == 1 ? 1 : 0;
    }
    // 3 sigma of a fair binomial at 1e6 draws is 0.0015.
    EXPECT_NEAR(static_cast<double>(ones) / draws, 0.5, 0.002);
}

TEST(Sample, PerAtomFrequencies) {
    const auto dist = ServiceTimeDist::parse("1:0.1, 2:0.2, 4:0.3, 9:0.4");
    Rng rng(77);
    const int draws = 1'000'000;
    std::vector<int> counts(10, 0);
    for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(dist.sample(rng))];
    for (const auto& atom : dist.support()) {
        const double sigma = std::sqrt(atom.prob * (1.0 - atom.prob) / draws);
        EXPECT_NEAR(counts[static_cast<std::size_t>(atom.y)] / static_cast<double>(draws), atom.prob, 4.0 * sigma);
    }
}

TEST(Sample, ReplaysFromSeed) {
    const auto dist = ServiceTimeDist::parse("1:0.3, 2:0.3, 6:0.4");
    Rng a(5);
    Rng b(5);
    for (int i = 0; i < 10'000; ++i) {
        ASSERT_EQ(dist.sample(a), dist.sample(b));
    }
}
