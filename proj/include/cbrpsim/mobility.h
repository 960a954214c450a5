// Random-waypoint motion: closed-form legs evaluated lazily.

#ifndef CBRPSIM_MOBILITY_H
#define CBRPSIM_MOBILITY_H

#include "cbrpsim/scenario-config.h"
#include "cbrpsim/types.h"

#include <ostream>
#include <random>
#include <vector>

namespace cbrpsim
{

struct WaypointLeg
{
    Position origin;
    Position destination;
    double speed = 0.0;
    Time depart_time = 0.0;
    Time arrive_time = 0.0;
    Time pause_until = 0.0;
};

/// Draws the next leg from `current` at time `now`: destination uniform in
/// the area, speed uniform in [min_speed, max_speed].
WaypointLeg NextLeg(const Position& current, Time now, const ScenarioConfig& cfg,
                    std::mt19937_64& rng);

/// A leg that never ends at `where`.
WaypointLeg StationaryLeg(const Position& where, Time now);

/// Throws std::out_of_range when t is outside [depart_time, pause_until].
Position PositionAt(const WaypointLeg& leg, Time t);

/// One node's trajectory. Advance() is called by the engine at each
/// waypoint arrival; positions within the current leg are exact.
class MobilityTrack
{
  public:
    MobilityTrack(const Position& start, const ScenarioConfig& cfg, std::mt19937_64 rng);

    const WaypointLeg& CurrentLeg() const { return m_leg; }
    Position PositionAt(Time t) const;

    /// Moves to the next leg; requires t == CurrentLeg().pause_until.
    const WaypointLeg& Advance(Time t);

  private:
    const ScenarioConfig* m_cfg;
    std::mt19937_64 m_rng;
    WaypointLeg m_leg;
};

/// Writes `time,node_id,x,y` rows sampled every `period` seconds. Tracks are
/// replayed from copies, so the caller's tracks are untouched.
void WriteMobilityTrace(std::ostream& out, std::vector<MobilityTrack> tracks, Time duration,
                        Time period);

} // namespace cbrpsim

#endif // CBRPSIM_MOBILITY_H
