#include "freshness/cli/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "freshness/simulator.hpp"

namespace freshness::cli {
namespace {

using LineMap = std::map<std::string, int>;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = text.find(',', pos);
        const auto part = trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
        if (!part.empty()) {
            parts.push_back(part);
        }
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
    return parts;
}

double to_real(std::string_view text, int line, const std::string& field) {
    const std::string s(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) {
        throw ConfigError(line, field, fmt::format("'{}' is not a number", text));
    }
    return value;
}

template <class Int>
Int to_integer(std::string_view text, int line, const std::string& field) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(line, field, fmt::format("'{}' is not an integer", text));
    }
    return value;
}

std::vector<double> to_reals(std::string_view text, int line, const std::string& field) {
    std::vector<double> values;
    for (const auto part : split_list(text)) {
        values.push_back(to_real(part, line, field));
    }
    return values;
}

std::string join_reals(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        out += out.empty() ? "" : ", ";
        out += fmt::format("{:.17g}", v);
    }
    return out;
}

SourceKind to_source_kind(std::string_view s, int line) {
    if (s == "binary") return SourceKind::binary;
    if (s == "gaussian") return SourceKind::gaussian;
    if (s == "tabulated") return SourceKind::tabulated;
    throw ConfigError(line, "source.kind", fmt::format("unknown source kind '{}' (binary, gaussian, tabulated)", s));
}

std::string_view to_string(SourceKind k) {
    switch (k) {
    case SourceKind::binary: return "binary";
    case SourceKind::gaussian: return "gaussian";
    case SourceKind::tabulated: return "tabulated";
    }
    return "";
}

PenaltyKind to_penalty_kind(std::string_view s, int line) {
    if (s == "negated-mi") return PenaltyKind::negated_mi;
    if (s == "affine") return PenaltyKind::affine;
    if (s == "table") return PenaltyKind::table;
    throw ConfigError(line, "penalty.kind", fmt::format("unknown penalty kind '{}' (negated-mi, affine, table)", s));
}

std::string_view to_string(PenaltyKind k) {
    switch (k) {
    case PenaltyKind::negated_mi: return "negated-mi";
    case PenaltyKind::affine: return "affine";
    case PenaltyKind::table: return "table";
    }
    return "";
}

PolicyKind to_policy_kind(std::string_view s, int line) {
    if (s == "optimal") return PolicyKind::optimal;
    if (s == "zero-wait") return PolicyKind::zero_wait;
    if (s == "uniform") return PolicyKind::uniform;
    throw ConfigError(line, "policy.list", fmt::format("unknown policy '{}' (optimal, zero-wait, uniform)", s));
}

int line_of(const LineMap* lines, const std::string& field) {
    if (lines == nullptr) {
        return 0;
    }
    const auto it = lines->find(field);
    return it == lines->end() ? 0 : it->second;
}

// Runs a model constructor and re-raises its validation failure against a field.
void check(const LineMap* lines, const std::string& field, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ConfigError(line_of(lines, field), field, e.what());
    }
}

void validate_impl(const ExperimentConfig& c, const LineMap* lines) {
    auto fail = [&](const std::string& field, const std::string& message) {
        throw ConfigError(line_of(lines, field), field, message);
    };
    const std::string source_field = c.source.kind == SourceKind::binary     ? "source.q"
                                     : c.source.kind == SourceKind::gaussian ? "source.a"
                                                                             : "source.values";
    check(lines, source_field, [&] { (void)c.source_model(); });
    check(lines, "service.dist", [&] { (void)c.service_dist(); });
    const std::string penalty_field = c.penalty.kind == PenaltyKind::affine  ? "penalty.slope"
                                      : c.penalty.kind == PenaltyKind::table ? "penalty.values"
                                                                             : "penalty.kind";
    check(lines, penalty_field, [&] { (void)c.penalty_function(); });
    if (c.policies.empty()) fail("policy.list", "policy list is empty");
    if (c.uniform_period && *c.uniform_period < 1) fail("policy.uniform_period", "uniform period must be positive");
    if (c.horizon < 1) fail("simulation.horizon", "horizon must be positive");
    if (c.seed_count < 1) fail("simulation.seeds", "seed count must be positive");
    if (c.delta0 < 1) fail("simulation.delta0", "initial age must be positive");
    if (!c.forced_services.empty()) {
        const ServiceTimeDist dist = c.service_dist();
        for (Steps y : c.forced_services) {
            if (!dist.contains(y)) {
                fail("simulation.forced_services", fmt::format("forced service time {} is not in the support", y));
            }
        }
    }
    if (c.sweep_variable != "q" && c.sweep_variable != "a") fail("sweep.variable", "sweep variable must be q or a");
    if (!std::is_sorted(c.sweep_grid.begin(), c.sweep_grid.end()) ||
        std::adjacent_find(c.sweep_grid.begin(), c.sweep_grid.end()) != c.sweep_grid.end()) {
        fail("sweep.grid", "sweep grid must be strictly increasing");
    }
    if (!(c.tol > 0.0)) fail("solver.tol", "solver tolerance must be positive");
    if (c.z_max < 1) fail("solver.z_max", "z_max must be positive");
    if (c.delta_max < 0) fail("curve.delta_max", "delta_max must be non-negative");
    if (c.oracle_mode != "random" && c.oracle_mode != "config") fail("oracle.mode", "oracle mode must be random or config");
    if (c.oracle_instances < 1) fail("oracle.instances", "instance count must be positive");
    if (c.oracle_z_cap < 0) fail("oracle.z_cap", "z_cap must be non-negative");
}

} // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : ValidationError(line > 0 ? fmt::format("config line {}: {}: {}", line, field, message)
                               : fmt::format("{}: {}", field, message)),
      line_(line),
      field_(std::move(field)) {}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::optimal: return "optimal";
    case PolicyKind::zero_wait: return "zero-wait";
    case PolicyKind::uniform: return "uniform";
    }
    return "";
}

std::vector<double> parse_grid(std::string_view text) {
    text = trim(text);
    if (text.find(':') == std::string_view::npos) {
        return to_reals(text, 0, "sweep.grid");
    }
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t end = text.find(':', pos);
        parts.push_back(trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos)));
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
    if (parts.size() != 3) {
        throw ConfigError(0, "sweep.grid", "range grid must be start:stop:step");
    }
    const double start = to_real(parts[0], 0, "sweep.grid");
    const double stop = to_real(parts[1], 0, "sweep.grid");
    const double step = to_real(parts[2], 0, "sweep.grid");
    if (!(step > 0.0) || stop < start) {
        throw ConfigError(0, "sweep.grid", "range grid needs step > 0 and stop >= start");
    }
    std::vector<double> grid;
    // Points are start + k step, snapped to 12 decimals so that endpoints
    // such as 0.5 come out exact.
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) {
        grid.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    return grid;
}

MarkovSourceModel ExperimentConfig::source_model() const {
    switch (source.kind) {
    case SourceKind::binary: return MarkovSourceModel::binary_symmetric(source.q);
    case SourceKind::gaussian: return MarkovSourceModel::gaussian_ar1(source.a, source.sigma2);
    case SourceKind::tabulated: return MarkovSourceModel::tabulated(source.values);
    }
    throw ValidationError("unknown source kind");
}

ServiceTimeDist ExperimentConfig::service_dist() const { return ServiceTimeDist::from_atoms(service); }

AgePenalty ExperimentConfig::penalty_function() const {
    switch (penalty.kind) {
    case PenaltyKind::negated_mi: return AgePenalty::negated_mi(source_model());
    case PenaltyKind::affine: return AgePenalty::affine(penalty.slope, penalty.intercept);
    case PenaltyKind::table: return AgePenalty::table(penalty.values);
    }
    throw ValidationError("unknown penalty kind");
}

SolverOptions ExperimentConfig::solver_options() const {
    SolverOptions options;
    options.tol = tol;
    options.z_max = z_max;
    return options;
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
    std::vector<std::uint64_t> out;
    for (std::int64_t i = 0; i < seed_count; ++i) {
        out.push_back(seed + static_cast<std::uint64_t>(i));
    }
    return out;
}

Steps ExperimentConfig::effective_uniform_period() const {
    return uniform_period ? *uniform_period : uniform_period_for(service_dist());
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig c;
    LineMap lines;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = text.find('\n', pos);
        std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        const auto comment = raw.find_first_of("#;");
        const std::string_view line = trim(raw.substr(0, comment));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(line_no, "section", fmt::format("malformed section header '{}'", line));
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            constexpr std::array<std::string_view, 10> known{"source", "service", "penalty", "policy", "simulation",
                                                             "sweep",  "solver",  "curve",   "oracle", "output"};
            if (std::find(known.begin(), known.end(), section) == known.end()) {
                throw ConfigError(line_no, "section", fmt::format("unknown section [{}]", section));
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, section, fmt::format("expected key = value, got '{}'", line));
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const std::string field = section + "." + key;
        if (lines.count(field) != 0) {
            throw ConfigError(line_no, field, fmt::format("duplicate key (first set on line {})", lines[field]));
        }
        lines[field] = line_no;
        const int ln = line_no;

        if (field == "source.kind") c.source.kind = to_source_kind(value, ln);
        else if (field == "source.q") c.source.q = to_real(value, ln, field);
        else if (field == "source.a") c.source.a = to_real(value, ln, field);
        else if (field == "source.sigma2") c.source.sigma2 = to_real(value, ln, field);
        else if (field == "source.values") c.source.values = to_reals(value, ln, field);
        else if (field == "service.dist") {
            // Declared atoms are kept verbatim so serialization round-trips.
            try {
                c.service = ServiceTimeDist::parse_atoms(value);
            } catch (const ValidationError& e) {
                throw ConfigError(ln, field, e.what());
            }
        } else if (field == "penalty.kind") c.penalty.kind = to_penalty_kind(value, ln);
        else if (field == "penalty.slope") c.penalty.slope = to_real(value, ln, field);
        else if (field == "penalty.intercept") c.penalty.intercept = to_real(value, ln, field);
        else if (field == "penalty.values") c.penalty.values = to_reals(value, ln, field);
        else if (field == "policy.list") {
            c.policies.clear();
            for (const auto part : split_list(value)) {
                c.policies.push_back(to_policy_kind(part, ln));
            }
        } else if (field == "policy.uniform_period") c.uniform_period = to_integer<Steps>(value, ln, field);
        else if (field == "simulation.horizon") c.horizon = to_integer<Steps>(value, ln, field);
        else if (field == "simulation.seed") c.seed = to_integer<std::uint64_t>(value, ln, field);
        else if (field == "simulation.seeds") c.seed_count = to_integer<std::int64_t>(value, ln, field);
        else if (field == "simulation.delta0") c.delta0 = to_integer<Steps>(value, ln, field);
        else if (field == "simulation.forced_services") {
            c.forced_services.clear();
            for (const auto part : split_list(value)) {
                c.forced_services.push_back(to_integer<Steps>(part, ln, field));
            }
        } else if (field == "sweep.variable") c.sweep_variable = std::string(value);
        else if (field == "sweep.grid") {
            try {
                c.sweep_grid = parse_grid(value);
            } catch (const ConfigError& e) {
                throw ConfigError(ln, field, e.what());
            }
        } else if (field == "solver.tol") c.tol = to_real(value, ln, field);
        else if (field == "solver.z_max") c.z_max = to_integer<Steps>(value, ln, field);
        else if (field == "curve.delta_max") c.delta_max = to_integer<Steps>(value, ln, field);
        else if (field == "oracle.mode") c.oracle_mode = std::string(value);
        else if (field == "oracle.instances") c.oracle_instances = to_integer<int>(value, ln, field);
        else if (field == "oracle.z_cap") c.oracle_z_cap = to_integer<Steps>(value, ln, field);
        else if (field == "oracle.seed") c.oracle_seed = to_integer<std::uint64_t>(value, ln, field);
        else if (field == "output.path") c.output_path = std::string(value);
        else throw ConfigError(ln, field, "unknown key");
    }
    validate_impl(c, &lines);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(0, "--config", fmt::format("cannot open '{}'", path));
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void validate_config(const ExperimentConfig& config) { validate_impl(config, nullptr); }

std::string serialize_config(const ExperimentConfig& c) {
    std::string out;
    auto kv = [&out](std::string_view key, const std::string& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    out += "[source]\n";
    kv("kind", std::string(to_string(c.source.kind)));
    kv("q", fmt::format("{:.17g}", c.source.q));
    kv("a", fmt::format("{:.17g}", c.source.a));
    kv("sigma2", fmt::format("{:.17g}", c.source.sigma2));
    if (!c.source.values.empty()) kv("values", join_reals(c.source.values));

    out += "\n[service]\n";
    std::string dist;
    for (const auto& atom : c.service) {
        dist += dist.empty() ? "" : ", ";
        dist += fmt::format("{}:{:.17g}", atom.y, atom.prob);
    }
    kv("dist", dist);

    out += "\n[penalty]\n";
    kv("kind", std::string(to_string(c.penalty.kind)));
    kv("slope", fmt::format("{:.17g}", c.penalty.slope));
    kv("intercept", fmt::format("{:.17g}", c.penalty.intercept));
    if (!c.penalty.values.empty()) kv("values", join_reals(c.penalty.values));

    out += "\n[policy]\n";
    std::string policies;
    for (PolicyKind p : c.policies) {
        policies += policies.empty() ? "" : ", ";
        policies += to_string(p);
    }
    kv("list", policies);
    if (c.uniform_period) kv("uniform_period", std::to_string(*c.uniform_period));

    out += "\n[simulation]\n";
    kv("horizon", std::to_string(c.horizon));
    kv("seed", std::to_string(c.seed));
    kv("seeds", std::to_string(c.seed_count));
    kv("delta0", std::to_string(c.delta0));
    if (!c.forced_services.empty()) {
        std::string forced;
        for (Steps y : c.forced_services) {
            forced += forced.empty() ? "" : ", ";
            forced += std::to_string(y);
        }
        kv("forced_services", forced);
    }

    out += "\n[sweep]\n";
    kv("variable", c.sweep_variable);
    if (!c.sweep_grid.empty()) kv("grid", join_reals(c.sweep_grid));

    out += "\n[solver]\n";
    kv("tol", fmt::format("{:.17g}", c.tol));
    kv("z_max", std::to_string(c.z_max));

    out += "\n[curve]\n";
    kv("delta_max", std::to_string(c.delta_max));

    out += "\n[oracle]\n";
    kv("mode", c.oracle_mode);
    kv("instances", std::to_string(c.oracle_instances));
    kv("z_cap", std::to_string(c.oracle_z_cap));
    kv("seed", std::to_string(c.oracle_seed));

    if (!c.output_path.empty()) {
        out += "\n[output]\n";
        kv("path", c.output_path);
    }
    return out;
}

} // namespace freshness::cli
