// Core value types shared by every part of the simulator.

#ifndef CBRPSIM_TYPES_H
#define CBRPSIM_TYPES_H

#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace cbrpsim
{

using NodeId = std::uint32_t;

/// Simulation time in seconds.
using Time = double;

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
inline constexpr Time kForever = std::numeric_limits<Time>::infinity();

struct Position
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline double
Distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

enum class Role : std::uint8_t
{
    Undecided,
    ClusterHead,
    Member,
};

enum class Protocol : std::uint8_t
{
    Cbrp,
    CrossCbrp,
};

std::string_view ToString(Role role);
std::string_view ToString(Protocol protocol);

/// Accepts "cbrp" and "cross-cbrp" (case-sensitive). Throws std::invalid_argument otherwise.
Protocol ParseProtocol(std::string_view text);

} // namespace cbrpsim

#endif // CBRPSIM_TYPES_H
