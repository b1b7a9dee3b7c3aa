#include <random>
#include <string>

#include <gtest/gtest.h>

#include "freshness/cli/config.hpp"

using namespace freshness;
using namespace freshness::cli;

namespace {

int error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

ExperimentConfig random_config(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ExperimentConfig c;
    switch (gen() % 3) {
    case 0:
        c.source.kind = SourceKind::binary;
        c.source.q = 0.5 * unit(gen);
        c.sweep_variable = "q";
        break;
    case 1:
        c.source.kind = SourceKind::gaussian;
        c.source.a = 1.8 * unit(gen) - 0.9;
        c.source.sigma2 = 0.1 + 3 * unit(gen);
        c.sweep_variable = "a";
        break;
    default:
        c.source.kind = SourceKind::tabulated;
        c.source.values = {3.0, 1.0 / 3.0, 0.1, 0.0};
        c.sweep_variable = "q";
        break;
    }
    c.service = {{1, unit(gen) * 0.5 + 0.1}, {static_cast<Steps>(2 + gen() % 9), 0.0}};
    c.service[1].prob = 1.0 - c.service[0].prob;
    if (gen() % 2 == 0) {
        c.penalty.kind = PenaltyKind::affine;
        c.penalty.slope = unit(gen);
        c.penalty.intercept = -unit(gen) / 7.0;
    }
    c.policies = gen() % 2 == 0 ? std::vector<PolicyKind>{PolicyKind::zero_wait}
                                : std::vector<PolicyKind>{PolicyKind::uniform, PolicyKind::optimal};
    if (gen() % 2 == 0) c.uniform_period = static_cast<Steps>(1 + gen() % 20);
    c.horizon = static_cast<Steps>(1 + gen() % 1'000'000);
    c.seed = gen();
    c.seed_count = static_cast<std::int64_t>(1 + gen() % 50);
    c.delta0 = static_cast<Steps>(1 + gen() % 5);
    if (gen() % 2 == 0) c.forced_services = {1, c.service[1].y, 1};
    c.sweep_grid = {unit(gen) * 0.25, 0.25};
    c.tol = 1e-12 + unit(gen) * 1e-6;
    c.z_max = static_cast<Steps>(1 + gen() % 10'000);
    c.delta_max = static_cast<Steps>(gen() % 100);
    c.oracle_mode = gen() % 2 == 0 ? "random" : "config";
    c.oracle_instances = static_cast<int>(1 + gen() % 40);
    c.oracle_z_cap = static_cast<Steps>(gen() % 50);
    c.oracle_seed = gen();
    if (gen() % 2 == 0) c.output_path = "out dir/result.csv";
    return c;
}

} // namespace

TEST(Config, DefaultsFromEmptyText) {
    const ExperimentConfig c = parse_config("");
    EXPECT_EQ(c, ExperimentConfig{});
    EXPECT_EQ(c.service_dist(), ServiceTimeDist::parse("1:0.5, 11:0.5"));
    EXPECT_EQ(c.effective_uniform_period(), 6);
}

TEST(Config, ParsesSections) {
    const ExperimentConfig c = parse_config(R"(# comment
[source]
kind = gaussian   ; trailing comment
a = 0.7
sigma2 = 2

[service]
dist = 2:0.25, 3:0.75

[policy]
list = zero-wait, optimal
uniform_period = 4

[simulation]
horizon = 500
seeds = 3
seed = 42
forced_services = 2, 3, 3

[sweep]
variable = a
grid = 0.1, 0.5
)");
    EXPECT_EQ(c.source.kind, SourceKind::gaussian);
    EXPECT_EQ(c.source.a, 0.7);
    EXPECT_EQ(c.source_model(), MarkovSourceModel::gaussian_ar1(0.7, 2.0));
    EXPECT_EQ(c.service_dist().mean(), 2.75);
    EXPECT_EQ(c.policies, (std::vector<PolicyKind>{PolicyKind::zero_wait, PolicyKind::optimal}));
    EXPECT_EQ(c.effective_uniform_period(), 4);
    EXPECT_EQ(c.seeds(), (std::vector<std::uint64_t>{42, 43, 44}));
    EXPECT_EQ(c.forced_services, (std::vector<Steps>{2, 3, 3}));
    EXPECT_EQ(c.sweep_grid, (std::vector<double>{0.1, 0.5}));
}

TEST(Config, RoundTripProperty) {
    std::mt19937_64 gen(6);
    for (int i = 0; i < 200; ++i) {
        const ExperimentConfig c = random_config(gen);
        const std::string text = serialize_config(c);
        EXPECT_EQ(parse_config(text), c) << text;
        EXPECT_EQ(serialize_config(parse_config(text)), text);
    }
}

TEST(Config, LineNumberedErrors) {
    EXPECT_EQ(error_line("[source]\nkind = binary\nq = 0.7\n"), 3);
    EXPECT_EQ(error_line("[source]\nq = abc\n"), 2);
    EXPECT_EQ(error_line("\n\n[service]\ndist = 0:1\n"), 4);
    EXPECT_EQ(error_line("[simulation]\nhorizon = 10\nhorizon = 20\n"), 3);
    EXPECT_EQ(error_line("[solver]\nspeed = 3\n"), 2);
    EXPECT_EQ(error_line("[nowhere]\n"), 1);
    EXPECT_EQ(error_line("q = 0.1\n"), 1);
    EXPECT_EQ(error_line("[source\n"), 1);
    EXPECT_EQ(error_line("[policy]\nlist = optimal, lazy\n"), 2);
    EXPECT_EQ(error_line("[simulation]\nhorizon = 0\n"), 2);
}

TEST(Config, ErrorMessagesNameField) {
    try {
        parse_config("[service]\ndist = 1:0.5, 2:0.6\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.field(), "service.dist");
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Config, GridRange) {
    const auto grid = parse_grid("0.02:0.50:0.02");
    ASSERT_EQ(grid.size(), 25u);
    EXPECT_EQ(grid.front(), 0.02);
    EXPECT_EQ(grid[4], 0.1);
    EXPECT_EQ(grid.back(), 0.5);
    EXPECT_EQ(parse_grid("0.1, 0.3,0.2"), (std::vector<double>{0.1, 0.3, 0.2}));
    EXPECT_EQ(parse_grid("1:1:0.5"), (std::vector<double>{1.0}));
    EXPECT_THROW(parse_grid("0.1:0.5:0"), ValidationError);
    EXPECT_THROW(parse_grid("0.5:0.1:0.1"), ValidationError);
    EXPECT_TRUE(parse_grid("").empty());
}

TEST(Config, ShippedConfigsLoad) {
    for (const char* name : {"policy_sweep.ini", "threshold_trace.ini", "oracle_check.ini"}) {
        const ExperimentConfig c = load_config(std::string(FRESHNESS_CONFIG_DIR) + "/" + name);
        EXPECT_NO_THROW(validate_config(c)) << name;
    }
    const ExperimentConfig sweep = load_config(std::string(FRESHNESS_CONFIG_DIR) + "/policy_sweep.ini");
    EXPECT_EQ(sweep.sweep_grid.size(), 25u);
    EXPECT_EQ(sweep.horizon, 1'000'000);
    EXPECT_EQ(sweep.seed_count, 10);
}

TEST(Config, MissingFile) {
    EXPECT_THROW(load_config("/nonexistent/freshness.ini"), ValidationError);
}
