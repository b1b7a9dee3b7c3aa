#pragma once

#include <string>

namespace freshness {

/// Fixed CSV number format: 12 significant digits, "inf" / "-inf" / "nan"
/// literals, and no negative zero.
std::string format_real(double value);

} // namespace freshness
