#include "cbrpsim/interface-queue.h"

namespace cbrpsim
{

InterfaceQueue::InterfaceQueue(std::size_t capacity)
    : m_capacity(capacity)
{
}

EnqueueOutcome
InterfaceQueue::Enqueue(Packet packet)
{
    EnqueueOutcome out;
    if (!packet.IsControl())
    {
        if (m_slots.size() >= m_capacity)
        {
            out.result = EnqueueResult::DroppedIncoming;
            out.dropped = std::move(packet);
            return out;
        }
        m_slots.push_back(std::move(packet));
        return out;
    }

    if (m_slots.size() >= m_capacity)
    {
        if (m_controlCount >= m_capacity)
        {
            out.result = EnqueueResult::DroppedIncoming;
            out.dropped = std::move(packet);
            return out;
        }
        out.result = EnqueueResult::DroppedTailData;
        out.dropped = std::move(m_slots.back());
        m_slots.pop_back();
    }
    m_slots.insert(m_slots.begin() + static_cast<std::ptrdiff_t>(m_controlCount),
                   std::move(packet));
    ++m_controlCount;
    return out;
}

std::optional<Packet>
InterfaceQueue::Dequeue()
{
    if (m_slots.empty())
    {
        return std::nullopt;
    }
    Packet p = std::move(m_slots.front());
    m_slots.pop_front();
    if (p.IsControl())
    {
        --m_controlCount;
    }
    return p;
}

bool
InterfaceQueue::InvariantsHold() const
{
    if (m_slots.size() > m_capacity)
    {
        return false;
    }
    bool seenData = false;
    std::size_t controls = 0;
    for (const auto& p : m_slots)
    {
        if (p.IsControl())
        {
            if (seenData)
            {
                return false;
            }
            ++controls;
        }
        else
        {
            seenData = true;
        }
    }
    return controls == m_controlCount;
}

} // namespace cbrpsim
