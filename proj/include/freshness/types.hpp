#pragma once

#include <cstdint>

namespace freshness {

// Discrete time steps: ages, service times, waiting times, horizons.
using Steps = std::int64_t;

} // namespace freshness

namespace freshness::detail {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

} // namespace freshness::detail
