#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "freshness/errors.hpp"
#include "freshness/service.hpp"
#include "freshness/solver.hpp"
#include "freshness/sources.hpp"
#include "freshness/types.hpp"

namespace freshness::cli {

/// Raised for malformed or invalid config text. line is 0 for values that
/// came from flags or defaults.
class ConfigError : public ValidationError {
public:
    ConfigError(int line, std::string field, const std::string& message);

    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

enum class SourceKind { binary, gaussian, tabulated };
enum class PenaltyKind { negated_mi, affine, table };
enum class PolicyKind { optimal, zero_wait, uniform };

struct SourceSpec {
    SourceKind kind = SourceKind::binary;
    double q = 0.25;
    double a = 0.9;
    double sigma2 = 1.0;
    std::vector<double> values;

    bool operator==(const SourceSpec&) const = default;
};

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::negated_mi;
    double slope = 1.0;
    double intercept = 0.0;
    std::vector<double> values;

    bool operator==(const PenaltySpec&) const = default;
};

/// Everything a subcommand needs. Parsed from an INI-style file:
///
///   [source]     kind = binary|gaussian|tabulated, q, a, sigma2, values
///   [service]    dist = 1:0.5, 11:0.5
///   [penalty]    kind = negated-mi|affine|table, slope, intercept, values
///   [policy]     list = optimal, zero-wait, uniform; uniform_period
///   [simulation] horizon, seed, seeds (count), delta0, forced_services
///   [sweep]      variable = q|a, grid = start:stop:step or a list
///   [solver]     tol, z_max
///   [curve]      delta_max
///   [oracle]     mode = random|config, instances, z_cap, seed
///   [output]     path
///
/// '#' and ';' start comments. Unknown sections or keys are errors.
struct ExperimentConfig {
    SourceSpec source;
    std::vector<ServiceTimeDist::Atom> service{{1, 0.5}, {11, 0.5}};
    PenaltySpec penalty;
    std::vector<PolicyKind> policies{PolicyKind::optimal, PolicyKind::zero_wait, PolicyKind::uniform};
    std::optional<Steps> uniform_period;
    Steps horizon = 100'000;
    std::uint64_t seed = 1;
    std::int64_t seed_count = 10;
    Steps delta0 = 1;
    std::vector<Steps> forced_services;
    std::string sweep_variable = "q";
    std::vector<double> sweep_grid;
    double tol = 1e-10;
    Steps z_max = 10'000;
    Steps delta_max = 30;
    std::string oracle_mode = "random";
    int oracle_instances = 20;
    Steps oracle_z_cap = 40;
    std::uint64_t oracle_seed = 2024;
    std::string output_path;

    bool operator==(const ExperimentConfig&) const = default;

    MarkovSourceModel source_model() const;
    ServiceTimeDist service_dist() const;
    /// The configured penalty; negated-mi uses source_model().
    AgePenalty penalty_function() const;
    SolverOptions solver_options() const;
    /// seed, seed + 1, ..., seed + seed_count - 1.
    std::vector<std::uint64_t> seeds() const;
    Steps effective_uniform_period() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Checks cross-field constraints and that every model constructor accepts
/// its parameters. Throws ConfigError.
void validate_config(const ExperimentConfig& config);

/// "0.02:0.5:0.02" (inclusive, values rounded to 12 decimals) or "0.1, 0.2".
std::vector<double> parse_grid(std::string_view text);

std::string_view to_string(PolicyKind kind);

} // namespace freshness::cli
