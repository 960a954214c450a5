// Per-node interface queue: control packets ahead of data, drop-tail on
// overflow, with a full queue evicting its tail data packet to admit a
// control packet.

#ifndef CBRPSIM_INTERFACE_QUEUE_H
#define CBRPSIM_INTERFACE_QUEUE_H

#include "cbrpsim/packet.h"

#include <deque>
#include <optional>

namespace cbrpsim
{

enum class EnqueueResult : std::uint8_t
{
    Accepted,
    DroppedIncoming,
    DroppedTailData,
};

struct EnqueueOutcome
{
    EnqueueResult result = EnqueueResult::Accepted;
    /// Set for DroppedIncoming (the incoming packet) and DroppedTailData (the evicted packet).
    std::optional<Packet> dropped;
};

class InterfaceQueue
{
  public:
    explicit InterfaceQueue(std::size_t capacity = 50);

    EnqueueOutcome Enqueue(Packet packet);
    std::optional<Packet> Dequeue();

    std::size_t Size() const { return m_slots.size(); }
    std::size_t Capacity() const { return m_capacity; }
    bool Empty() const { return m_slots.empty(); }
    const std::deque<Packet>& Slots() const { return m_slots; }

    /// Capacity bound and control-before-data ordering.
    bool InvariantsHold() const;

  private:
    std::size_t m_capacity;
    std::size_t m_controlCount = 0;
    std::deque<Packet> m_slots;
};

} // namespace cbrpsim

#endif // CBRPSIM_INTERFACE_QUEUE_H
