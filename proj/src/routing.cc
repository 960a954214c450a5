#include "cbrpsim/routing.h"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cbrpsim
{

namespace
{

bool
Contains(const std::vector<NodeId>& v, NodeId id)
{
    return std::find(v.begin(), v.end(), id) != v.end();
}

bool
HasDuplicates(std::vector<NodeId> v)
{
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

} // namespace

std::string_view
ToString(RouteEventKind kind)
{
    switch (kind)
    {
    case RouteEventKind::RreqSent:
        return "rreq_sent";
    case RouteEventKind::RrepRecv:
        return "rrep_recv";
    case RouteEventKind::RouteBreak:
        return "route_break";
    case RouteEventKind::Delivery:
        return "delivery";
    }
    return "?";
}

std::map<NodeId, std::vector<NodeId>>
NeighboringClusterPaths(const NodeClusterState& head, const std::vector<NodeId>& recorded)
{
    std::map<NodeId, std::vector<NodeId>> paths;
    const NodeId self = head.Id();
    const auto& table = head.Neighbors();

    for (const auto& [id, n] : table)
    {
        if (n.IsBidirectional() && n.role == Role::ClusterHead && !Contains(recorded, id))
        {
            paths[id] = {id};
        }
    }

    // gateways already on the recorded route are allowed; the loop is cut
    // when the request revisits them
    auto isOurGateway = [&](const NeighborEntry& g) {
        return g.IsBidirectional() && g.role == Role::Member && Contains(g.heads, self);
    };

    for (const auto& [gid, g] : table)
    {
        if (!isOurGateway(g))
        {
            continue;
        }
        for (const auto& r : g.reported)
        {
            if (r.link == LinkState::Bidirectional && r.role == Role::ClusterHead &&
                r.id != self && !Contains(recorded, r.id) && !paths.count(r.id))
            {
                paths[r.id] = {gid, r.id};
            }
        }
    }

    for (const auto& [gid, g] : table)
    {
        if (!isOurGateway(g))
        {
            continue;
        }
        for (const auto& x : g.reported)
        {
            if (x.link != LinkState::Bidirectional || x.role != Role::Member || x.id == self)
            {
                continue;
            }
            for (NodeId h2 : x.heads)
            {
                if (h2 != self && h2 != gid && !Contains(recorded, h2) && !paths.count(h2))
                {
                    paths[h2] = {gid, x.id, h2};
                }
            }
        }
    }
    return paths;
}

RoutingAgent::RoutingAgent(NodeId self, RoutingParams params)
    : m_self(self),
      m_params(params)
{
}

std::size_t
RoutingAgent::PendingCount() const
{
    std::size_t n = 0;
    for (const auto& [dst, q] : m_pending)
    {
        n += q.size();
    }
    return n;
}

std::size_t
RoutingAgent::PendingCount(NodeId target) const
{
    auto it = m_pending.find(target);
    return it == m_pending.end() ? 0 : it->second.size();
}

void
RoutingAgent::InvalidateRoute(NodeId dst)
{
    m_cache.erase(dst);
}

void
RoutingAgent::SendData(Packet data, const NodeClusterState& cluster, Time now,
                       RoutingOutput& out)
{
    const NodeId dst = data.dst;
    if (auto it = m_cache.find(dst); it != m_cache.end())
    {
        auto& payload = std::get<DataPayload>(data.payload);
        payload.route = it->second.hops;
        payload.hop_index = 0;
        if (SendOnRoute(data, cluster, now, out))
        {
            return;
        }
        m_cache.erase(it);
        out.events.push_back({now, RouteEventKind::RouteBreak, m_self, dst, payload.route.size()});
    }

    auto& queue = m_pending[dst];
    if (queue.size() >= m_params.pending_capacity)
    {
        out.dropped_data.emplace_back(std::move(queue.front()), DropCause::NoRoute);
        queue.pop_front();
    }
    queue.push_back(std::move(data));
    if (!m_discoveries.count(dst))
    {
        StartDiscovery(dst, cluster, now, out);
    }
}

bool
RoutingAgent::SendOnRoute(Packet& data, const NodeClusterState& cluster, Time now,
                          RoutingOutput& out)
{
    (void)now;
    auto& payload = std::get<DataPayload>(data.payload);
    const auto next = payload.route.at(payload.hop_index + 1);
    if (!cluster.IsBidirectionalNeighbor(next))
    {
        return false;
    }
    payload.hop_index += 1;
    data.next_hop = next;
    out.transmit.push_back(std::move(data));
    return true;
}

void
RoutingAgent::StartDiscovery(NodeId target, const NodeClusterState& cluster, Time now,
                             RoutingOutput& out)
{
    auto& d = m_discoveries[target];
    d.attempts = 0;
    d.generation = m_nextGeneration++;
    const auto gen = d.generation;
    const auto status = OriginateRequest(target, cluster, now, out);
    if (status != OriginateStatus::AnsweredLocally)
    {
        out.timers.push_back({now + m_params.rreq_timeout, target, gen});
    }
}

OriginateStatus
RoutingAgent::OriginateRequest(NodeId target, const NodeClusterState& cluster, Time now,
                               RoutingOutput& out)
{
    if (cluster.IsBidirectionalNeighbor(target))
    {
        InstallRoute({m_self, target}, cluster, now, out);
        return OriginateStatus::AnsweredLocally;
    }

    const bool isHead = cluster.GetRole() == Role::ClusterHead;
    if (!isHead && cluster.Heads().empty())
    {
        return OriginateStatus::NoClusterHead;
    }

    RouteRequest rreq;
    rreq.id = {m_self, m_nextSequence++};
    rreq.target = target;
    rreq.recorded_route = {m_self};
    out.events.push_back({now, RouteEventKind::RreqSent, m_self, target, 1});

    if (isHead)
    {
        m_seen.insert({rreq.id, m_self});
        ForwardFromHead(std::move(rreq), cluster, now, out);
        return OriginateStatus::Sent;
    }
    for (NodeId h : cluster.Heads())
    {
        RouteRequest copy = rreq;
        copy.forward_path = {h};
        out.transmit.push_back(Packet::MakeRequest(std::move(copy), h, now));
    }
    return OriginateStatus::Sent;
}

void
RoutingAgent::ForwardFromHead(RouteRequest rreq, const NodeClusterState& cluster, Time now,
                              RoutingOutput& out)
{
    for (auto& [nextHead, path] : NeighboringClusterPaths(cluster, rreq.recorded_route))
    {
        RouteRequest copy = rreq;
        copy.forward_path = path;
        const NodeId first = path.front();
        out.transmit.push_back(Packet::MakeRequest(std::move(copy), first, now));
    }
}

void
RoutingAgent::Reply(const RouteRequest& rreq, std::vector<NodeId> route,
                    const NodeClusterState& cluster, Time now, RoutingOutput& out)
{
    (void)cluster;
    RouteReply rrep;
    rrep.id = rreq.id;
    rrep.target = rreq.target;
    rrep.route = std::move(route);
    // This node sits at the end of recorded_route.
    const auto selfIndex = rreq.recorded_route.size() - 1;
    if (selfIndex == 0)
    {
        return;
    }
    rrep.hop_index = selfIndex - 1;
    const NodeId prev = rrep.route[rrep.hop_index];
    out.transmit.push_back(Packet::MakeReply(std::move(rrep), prev, now));
}

void
RoutingAgent::ProcessRequest(RouteRequest rreq, const NodeClusterState& cluster, Time now,
                             RoutingOutput& out)
{
    if (rreq.forward_path.empty() || rreq.forward_path.front() != m_self)
    {
        return;
    }
    const NodeId intendedHead = rreq.forward_path.back();
    if (!m_seen.insert({rreq.id, intendedHead}).second)
    {
        return;
    }
    auto again = std::find(rreq.recorded_route.begin(), rreq.recorded_route.end(), m_self);
    rreq.recorded_route.erase(again, rreq.recorded_route.end());
    rreq.forward_path.erase(rreq.forward_path.begin());
    rreq.recorded_route.push_back(m_self);
    if (HasDuplicates(rreq.recorded_route))
    {
        ++out.duplicate_hops;
    }

    if (m_self == rreq.target)
    {
        Reply(rreq, rreq.recorded_route, cluster, now, out);
        return;
    }
    if (cluster.IsBidirectionalNeighbor(rreq.target))
    {
        auto route = rreq.recorded_route;
        route.push_back(rreq.target);
        Reply(rreq, std::move(route), cluster, now, out);
        return;
    }

    if (!rreq.forward_path.empty())
    {
        const NodeId next = rreq.forward_path.front();
        if (!cluster.IsBidirectionalNeighbor(next))
        {
            ++out.dropped_control;
            return;
        }
        out.transmit.push_back(Packet::MakeRequest(std::move(rreq), next, now));
        return;
    }

    if (cluster.GetRole() != Role::ClusterHead)
    {
        return;
    }
    ForwardFromHead(std::move(rreq), cluster, now, out);
}

void
RoutingAgent::ProcessReply(RouteReply rrep, const NodeClusterState& cluster, Time now,
                           RoutingOutput& out)
{
    if (rrep.hop_index >= rrep.route.size() || rrep.route[rrep.hop_index] != m_self)
    {
        throw std::logic_error("route reply delivered to node " + std::to_string(m_self) +
                               " which is not its addressee");
    }
    if (rrep.hop_index == 0)
    {
        out.events.push_back(
            {now, RouteEventKind::RrepRecv, m_self, rrep.target, rrep.route.size()});
        InstallRoute(std::move(rrep.route), cluster, now, out);
        return;
    }
    const NodeId prev = rrep.route[rrep.hop_index - 1];
    if (!cluster.IsBidirectionalNeighbor(prev))
    {
        ++out.dropped_control;
        return;
    }
    rrep.hop_index -= 1;
    out.transmit.push_back(Packet::MakeReply(std::move(rrep), prev, now));
}

void
RoutingAgent::InstallRoute(std::vector<NodeId> hops, const NodeClusterState& cluster, Time now,
                           RoutingOutput& out)
{
    const NodeId dst = hops.back();
    m_cache[dst] = CachedRoute{hops, now};
    m_discoveries.erase(dst);
    out.installed.push_back(hops);

    auto it = m_pending.find(dst);
    if (it == m_pending.end())
    {
        return;
    }
    std::deque<Packet> waiting = std::move(it->second);
    m_pending.erase(it);
    for (auto& p : waiting)
    {
        SendData(std::move(p), cluster, now, out);
    }
}

void
RoutingAgent::ForwardData(Packet data, const NodeClusterState& cluster, Time now,
                          RoutingOutput& out)
{
    auto& payload = std::get<DataPayload>(data.payload);
    if (payload.hop_index >= payload.route.size() || payload.route[payload.hop_index] != m_self)
    {
        throw std::logic_error("data packet " + std::to_string(payload.uid) + " at node " +
                               std::to_string(m_self) + " which is not on its route");
    }
    if (payload.hop_index + 1 == payload.route.size())
    {
        out.events.push_back(
            {now, RouteEventKind::Delivery, data.src, data.dst, payload.route.size()});
        out.delivered.push_back(std::move(data));
        return;
    }
    if (!SendOnRoute(data, cluster, now, out))
    {
        out.events.push_back(
            {now, RouteEventKind::RouteBreak, data.src, data.dst, payload.route.size()});
        out.broken.emplace_back(data.src, data.dst);
        out.dropped_data.emplace_back(std::move(data), DropCause::ForwardingFailure);
    }
}

void
RoutingAgent::OnDiscoveryTimeout(NodeId target, std::uint64_t generation,
                                 const NodeClusterState& cluster, Time now, RoutingOutput& out)
{
    auto it = m_discoveries.find(target);
    if (it == m_discoveries.end() || it->second.generation != generation)
    {
        return;
    }
    if (it->second.attempts < m_params.max_retries)
    {
        it->second.attempts += 1;
        const auto status = OriginateRequest(target, cluster, now, out);
        if (status != OriginateStatus::AnsweredLocally)
        {
            out.timers.push_back({now + m_params.rreq_timeout, target, generation});
        }
        return;
    }
    m_discoveries.erase(it);
    if (auto p = m_pending.find(target); p != m_pending.end())
    {
        for (auto& pkt : p->second)
        {
            out.dropped_data.emplace_back(std::move(pkt), DropCause::NoRoute);
        }
        m_pending.erase(p);
    }
}

} // namespace cbrpsim
