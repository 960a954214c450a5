// Timestamped events, totally ordered by (time, sequence).

#ifndef CBRPSIM_EVENT_QUEUE_H
#define CBRPSIM_EVENT_QUEUE_H

#include "cbrpsim/packet.h"
#include "cbrpsim/types.h"

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

namespace cbrpsim
{

enum class EventKind : std::uint8_t
{
    PacketDelivery,
    HelloTimer,
    TrafficEmit,
    WaypointArrival,
    NeighborExpiryScan,
    TransmitComplete,
    DiscoveryTimeout,
};

std::string_view ToString(EventKind kind);

struct DiscoveryTimer
{
    NodeId target = 0;
    std::uint64_t generation = 0;
};

struct FlowTick
{
    std::uint32_t flow_id = 0;
};

struct Event
{
    Time time = 0.0;
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::HelloTimer;
    NodeId node = 0;
    std::variant<std::monostate, Packet, FlowTick, DiscoveryTimer> payload;
};

class SchedulingError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

class EventQueue
{
  public:
    /// Assigns the next sequence number. Throws SchedulingError if
    /// event.time < Now().
    std::uint64_t Schedule(Event event);

    bool Empty() const { return m_heap.empty(); }
    std::size_t Size() const { return m_heap.size(); }
    const Event& Top() const { return m_heap.top(); }

    /// Removes the earliest event and advances Now() to its time.
    Event Pop();

    Time Now() const { return m_now; }

  private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.time != b.time)
            {
                return a.time > b.time;
            }
            return a.sequence > b.sequence;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> m_heap;
    std::uint64_t m_nextSequence = 0;
    Time m_now = 0.0;
};

} // namespace cbrpsim

#endif // CBRPSIM_EVENT_QUEUE_H
