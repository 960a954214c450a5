#include "cbrpsim/event-queue.h"

#include <string>

namespace cbrpsim
{

std::string_view
ToString(EventKind kind)
{
    switch (kind)
    {
    case EventKind::PacketDelivery:
        return "delivery";
    case EventKind::HelloTimer:
        return "hello_timer";
    case EventKind::TrafficEmit:
        return "traffic_emit";
    case EventKind::WaypointArrival:
        return "waypoint";
    case EventKind::NeighborExpiryScan:
        return "expiry_scan";
    case EventKind::TransmitComplete:
        return "tx_complete";
    case EventKind::DiscoveryTimeout:
        return "rreq_timeout";
    }
    return "?";
}

std::uint64_t
EventQueue::Schedule(Event event)
{
    if (event.time < m_now)
    {
        throw SchedulingError("cannot schedule at " + std::to_string(event.time) +
                              " before now = " + std::to_string(m_now));
    }
    event.sequence = m_nextSequence++;
    const auto seq = event.sequence;
    m_heap.push(std::move(event));
    return seq;
}

Event
EventQueue::Pop()
{
    Event e = m_heap.top();
    m_heap.pop();
    m_now = e.time;
    return e;
}

} // namespace cbrpsim
