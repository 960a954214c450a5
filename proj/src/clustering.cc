#include "cbrpsim/clustering.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cbrpsim
{

double
RelativeMobility(double prNew, double prOld)
{
    if (!(prNew > 0.0) || !(prOld > 0.0))
    {
        throw std::domain_error("relative mobility needs positive received powers");
    }
    return 10.0 * std::log10(prNew / prOld);
}

double
AggregateMobility(std::span<const double> samples)
{
    if (samples.empty())
    {
        return 0.0;
    }
    double sum = 0.0;
    for (double s : samples)
    {
        sum += s * s;
    }
    return sum / static_cast<double>(samples.size());
}

namespace
{

using Rank = std::pair<double, NodeId>;

template <typename RankOf>
RoleDecision
Elect(const NodeClusterState& s, Time now, RankOf rankOf, const Rank& self)
{
    if (now < s.Params().warmup)
    {
        return {s.GetRole(), s.Heads()};
    }

    std::set<NodeId> headNeighbors;
    std::set<NodeId> betterHeads;
    bool lowestAmongAll = true;
    bool lowestAmongFree = true;
    for (const auto& [id, n] : s.Neighbors())
    {
        if (!n.IsBidirectional())
        {
            continue;
        }
        if (n.role == Role::ClusterHead)
        {
            headNeighbors.insert(id);
            if (rankOf(n) < self)
            {
                betterHeads.insert(id);
            }
        }
        if (!(self < rankOf(n)))
        {
            lowestAmongAll = false;
            if (n.role != Role::Member)
            {
                lowestAmongFree = false;
            }
        }
    }

    if (s.GetRole() == Role::ClusterHead)
    {
        if (betterHeads.empty())
        {
            return {Role::ClusterHead, {s.Id()}};
        }
        return {Role::Member, betterHeads};
    }

    // Members never challenge a head; a node covered by any head joins it.
    if (!headNeighbors.empty())
    {
        return {Role::Member, headNeighbors};
    }
    if (lowestAmongAll)
    {
        return {Role::ClusterHead, {s.Id()}};
    }
    // A better-ranked neighbor that is a member of some other cluster will
    // never contend. Once the node has stayed undecided for a full hello
    // interval (so member labels in the table are fresh), only free
    // neighbors count.
    if (s.GetRole() == Role::Undecided && lowestAmongFree &&
        now - s.UndecidedSince() >= s.Params().warmup)
    {
        return {Role::ClusterHead, {s.Id()}};
    }
    return {Role::Undecided, {}};
}

} // namespace

RoleDecision
ElectLowestId(const NodeClusterState& state, Time now)
{
    auto rankOf = [](const NeighborEntry& n) { return Rank{0.0, n.id}; };
    return Elect(state, now, rankOf, Rank{0.0, state.Id()});
}

RoleDecision
ElectLowestMobility(const NodeClusterState& state, Time now)
{
    auto rankOf = [](const NeighborEntry& n) { return Rank{n.advertised_mobility, n.id}; };
    return Elect(state, now, rankOf, Rank{state.AdvertisedMobility(), state.Id()});
}

NodeClusterState::NodeClusterState(NodeId id, ClusteringParams params)
    : m_id(id),
      m_params(params)
{
}

const NeighborEntry*
NodeClusterState::FindNeighbor(NodeId id) const
{
    auto it = m_neighbors.find(id);
    return it == m_neighbors.end() ? nullptr : &it->second;
}

bool
NodeClusterState::IsBidirectionalNeighbor(NodeId id) const
{
    const auto* n = FindNeighbor(id);
    return n != nullptr && n->IsBidirectional();
}

std::vector<NodeId>
NodeClusterState::BidirectionalNeighbors() const
{
    std::vector<NodeId> out;
    for (const auto& [id, n] : m_neighbors)
    {
        if (n.IsBidirectional())
        {
            out.push_back(id);
        }
    }
    return out;
}

HelloPacket
NodeClusterState::BuildHello()
{
    HelloPacket h;
    h.sender = m_id;
    h.role = m_role;
    if (m_params.protocol == Protocol::CrossCbrp)
    {
        h.mobility = m_mobility;
        m_advertisedMobility = m_mobility;
    }
    h.heads.assign(m_heads.begin(), m_heads.end());
    h.neighbors.reserve(m_neighbors.size());
    for (const auto& [id, n] : m_neighbors)
    {
        h.neighbors.push_back(HelloNeighbor{id, n.link, n.role, n.heads});
    }
    return h;
}

ClusterUpdate
NodeClusterState::OnHelloReceived(const HelloPacket& hello, double rxPower, Time now)
{
    const Role oldRole = m_role;
    auto [it, fresh] = m_neighbors.try_emplace(hello.sender);
    NeighborEntry& n = it->second;
    n.id = hello.sender;
    if (!fresh)
    {
        n.prev_rx_power = n.last_rx_power;
    }
    n.last_rx_power = rxPower;
    if (n.prev_rx_power)
    {
        n.rel_mobility = RelativeMobility(*n.last_rx_power, *n.prev_rx_power);
    }
    n.last_heard = now;
    n.expires_at = now + m_params.neighbor_timeout;
    n.role = hello.role;
    n.advertised_mobility = hello.mobility.value_or(kForever);
    n.heads = hello.heads;
    n.reported = hello.neighbors;
    const bool listsUs = std::any_of(hello.neighbors.begin(), hello.neighbors.end(),
                                     [this](const HelloNeighbor& e) { return e.id == m_id; });
    n.link = listsUs ? LinkState::Bidirectional : LinkState::UniFromNeighbor;

    RecomputeMobility();
    return RunElection(oldRole, now);
}

ClusterUpdate
NodeClusterState::ExpireNeighbors(Time now)
{
    const Role oldRole = m_role;
    std::vector<NodeId> removed;
    for (auto it = m_neighbors.begin(); it != m_neighbors.end();)
    {
        if (it->second.expires_at < now)
        {
            removed.push_back(it->first);
            it = m_neighbors.erase(it);
        }
        else
        {
            ++it;
        }
    }
    if (!removed.empty())
    {
        RecomputeMobility();
    }
    auto update = RunElection(oldRole, now);
    update.expired = std::move(removed);
    return update;
}

ClusterUpdate
NodeClusterState::RunElection(Role oldRole, Time now)
{
    const RoleDecision d = m_params.protocol == Protocol::Cbrp ? ElectLowestId(*this, now)
                                                               : ElectLowestMobility(*this, now);
    ClusterUpdate u;
    u.old_role = oldRole;
    u.new_role = d.role;
    u.heads_changed = d.heads != m_heads;
    if (d.role == Role::Undecided && m_role != Role::Undecided)
    {
        m_undecidedSince = now;
    }
    m_role = d.role;
    m_heads = d.heads;
    u.trigger_hello = u.RoleChanged();
    return u;
}

void
NodeClusterState::RecomputeMobility()
{
    std::vector<double> samples;
    samples.reserve(m_neighbors.size());
    for (const auto& [id, n] : m_neighbors)
    {
        if (n.rel_mobility)
        {
            samples.push_back(*n.rel_mobility);
        }
    }
    m_mobility = AggregateMobility(samples);
}

std::set<NodeId>
NodeClusterState::GatewaySet() const
{
    std::set<NodeId> out;
    if (m_role != Role::ClusterHead)
    {
        return out;
    }
    for (const auto& [id, n] : m_neighbors)
    {
        if (!n.IsBidirectional() || n.role != Role::Member ||
            std::find(n.heads.begin(), n.heads.end(), m_id) == n.heads.end())
        {
            continue;
        }
        for (const auto& r : n.reported)
        {
            if (r.link != LinkState::Bidirectional || r.id == m_id)
            {
                continue;
            }
            const bool otherHead = r.role == Role::ClusterHead;
            const bool otherMember =
                !r.heads.empty() &&
                std::find(r.heads.begin(), r.heads.end(), m_id) == r.heads.end();
            if (otherHead || otherMember)
            {
                out.insert(id);
                break;
            }
        }
    }
    return out;
}

bool
NodeClusterState::InvariantsHold() const
{
    for (const auto& [id, n] : m_neighbors)
    {
        if (n.rel_mobility.has_value() != (n.prev_rx_power && n.last_rx_power))
        {
            return false;
        }
    }
    switch (m_role)
    {
    case Role::ClusterHead:
        return m_heads == std::set<NodeId>{m_id};
    case Role::Member:
        if (m_heads.empty())
        {
            return false;
        }
        for (NodeId h : m_heads)
        {
            const auto* n = FindNeighbor(h);
            if (n == nullptr || !n->IsBidirectional() || n->role != Role::ClusterHead)
            {
                return false;
            }
        }
        return true;
    case Role::Undecided:
        return m_heads.empty();
    }
    return false;
}

} // namespace cbrpsim
