#include "cbrpsim/mobility.h"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace cbrpsim
{

WaypointLeg
NextLeg(const Position& current, Time now, const ScenarioConfig& cfg, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ux(0.0, cfg.area_width);
    std::uniform_real_distribution<double> uy(0.0, cfg.area_height);
    WaypointLeg leg;
    leg.origin = current;
    leg.destination.x = ux(rng);
    leg.destination.y = uy(rng);
    if (cfg.min_speed == cfg.max_speed)
    {
        leg.speed = cfg.max_speed;
    }
    else
    {
        std::uniform_real_distribution<double> us(cfg.min_speed, cfg.max_speed);
        leg.speed = us(rng);
    }
    leg.depart_time = now;
    leg.arrive_time = now + Distance(leg.origin, leg.destination) / leg.speed;
    leg.pause_until = leg.arrive_time + cfg.pause_time;
    return leg;
}

WaypointLeg
StationaryLeg(const Position& where, Time now)
{
    return WaypointLeg{where, where, 0.0, now, kForever, kForever};
}

Position
PositionAt(const WaypointLeg& leg, Time t)
{
    if (t < leg.depart_time || t > leg.pause_until)
    {
        throw std::out_of_range("time " + std::to_string(t) + " outside leg [" +
                                std::to_string(leg.depart_time) + ", " +
                                std::to_string(leg.pause_until) + "]");
    }
    if (t >= leg.arrive_time || leg.arrive_time == leg.depart_time)
    {
        return leg.destination;
    }
    if (t == leg.depart_time)
    {
        return leg.origin;
    }
    const double f = (t - leg.depart_time) / (leg.arrive_time - leg.depart_time);
    return {leg.origin.x + f * (leg.destination.x - leg.origin.x),
            leg.origin.y + f * (leg.destination.y - leg.origin.y)};
}

MobilityTrack::MobilityTrack(const Position& start, const ScenarioConfig& cfg,
                             std::mt19937_64 rng)
    : m_cfg(&cfg),
      m_rng(std::move(rng))
{
    m_leg = cfg.hold_positions ? StationaryLeg(start, 0.0) : NextLeg(start, 0.0, cfg, m_rng);
}

Position
MobilityTrack::PositionAt(Time t) const
{
    return cbrpsim::PositionAt(m_leg, t);
}

const WaypointLeg&
MobilityTrack::Advance(Time t)
{
    if (t != m_leg.pause_until)
    {
        throw std::logic_error("MobilityTrack::Advance called off a waypoint boundary");
    }
    m_leg = NextLeg(m_leg.destination, t, *m_cfg, m_rng);
    return m_leg;
}

void
WriteMobilityTrace(std::ostream& out, std::vector<MobilityTrack> tracks, Time duration,
                   Time period)
{
    out << "time,node_id,x,y\n";
    char buf[128];
    const auto steps = static_cast<long>(duration / period);
    for (long k = 0; k <= steps; ++k)
    {
        const Time t = k * period;
        for (std::size_t i = 0; i < tracks.size(); ++i)
        {
            while (tracks[i].CurrentLeg().pause_until < t)
            {
                tracks[i].Advance(tracks[i].CurrentLeg().pause_until);
            }
            const auto p = tracks[i].PositionAt(t);
            std::snprintf(buf, sizeof(buf), "%.6f,%zu,%.6f,%.6f\n", t, i, p.x, p.y);
            out << buf;
        }
    }
}

} // namespace cbrpsim
