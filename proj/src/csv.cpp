#include "freshness/csv.hpp"

#include <cmath>

#include <fmt/format.h>

namespace freshness {

std::string format_real(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0";
    }
    return fmt::format("{:.12g}", value);
}

} // namespace freshness
