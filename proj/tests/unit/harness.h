// Small synchronous drivers for cluster and routing state without the engine.

#ifndef CBRPSIM_TESTS_HARNESS_H
#define CBRPSIM_TESTS_HARNESS_H

#include "cbrpsim/clustering.h"
#include "cbrpsim/radio-channel.h"
#include "cbrpsim/routing.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cbrpsim::test
{

inline HelloNeighbor
Bi(NodeId id, Role role = Role::Undecided, std::vector<NodeId> heads = {})
{
    return HelloNeighbor{id, LinkState::Bidirectional, role, std::move(heads)};
}

inline HelloPacket
Hello(NodeId sender, Role role, std::vector<HelloNeighbor> neighbors = {},
      std::optional<double> mobility = std::nullopt, std::vector<NodeId> heads = {})
{
    HelloPacket h;
    h.sender = sender;
    h.role = role;
    h.mobility = mobility;
    if (heads.empty() && role == Role::ClusterHead)
    {
        heads = {sender};
    }
    h.heads = std::move(heads);
    h.neighbors = std::move(neighbors);
    return h;
}

/// Power ratio giving a relative mobility of `db`.
inline double
RatioForDb(double db)
{
    return std::pow(10.0, db / 10.0);
}

/// Static network of cluster and routing state driven in lock-step hello
/// rounds, with packets passed hop by hop over the range disc.
class StaticNet
{
  public:
    StaticNet(std::vector<Position> positions, double range, Protocol protocol,
              RoutingParams routing = {})
        : m_pos(std::move(positions)),
          m_range(range)
    {
        ClusteringParams p;
        p.protocol = protocol;
        p.neighbor_timeout = 6.0;
        p.warmup = 2.0;
        for (NodeId i = 0; i < m_pos.size(); ++i)
        {
            nodes.emplace_back(i, p);
            agents.emplace_back(i, routing);
        }
    }

    bool Adjacent(NodeId a, NodeId b) const
    {
        return a != b && InRange(m_pos[a], m_pos[b], m_range);
    }

    std::size_t Size() const { return m_pos.size(); }

    void HelloRound(Time t)
    {
        for (NodeId i = 0; i < nodes.size(); ++i)
        {
            const HelloPacket h = nodes[i].BuildHello();
            for (NodeId j = 0; j < nodes.size(); ++j)
            {
                if (Adjacent(i, j))
                {
                    const double d = std::max(1.0, Distance(m_pos[i], m_pos[j]));
                    nodes[j].OnHelloReceived(h, 1.0 / (d * d), t);
                }
            }
        }
        for (auto& n : nodes)
        {
            n.ExpireNeighbors(t);
        }
    }

    /// Hello rounds every 2 s starting at 0.5 s, up to `until`.
    void Form(Time until = 30.0)
    {
        for (Time t = 0.5; t < until; t += 2.0)
        {
            HelloRound(t);
            m_now = t;
        }
    }

    std::vector<NodeId> Heads() const
    {
        std::vector<NodeId> out;
        for (const auto& n : nodes)
        {
            if (n.GetRole() == Role::ClusterHead)
            {
                out.push_back(n.Id());
            }
        }
        return out;
    }

    /// Passes every transmitted packet of `out` (emitted by `from`) to its
    /// next hop while it is in range, until the network is quiet.
    void Pump(NodeId from, RoutingOutput out)
    {
        std::deque<std::pair<NodeId, Packet>> wire;
        Absorb(from, out, wire);
        while (!wire.empty())
        {
            auto [src, pkt] = std::move(wire.front());
            wire.pop_front();
            const NodeId to = pkt.next_hop;
            ++transmissions;
            if (!Adjacent(src, to))
            {
                ++link_failures;
                if (pkt.kind == PacketKind::Data)
                {
                    dropped.emplace_back(pkt, DropCause::ForwardingFailure);
                }
                continue;
            }
            RoutingOutput next;
            switch (pkt.kind)
            {
            case PacketKind::RouteRequest:
                ++rreq_hops;
                agents[to].ProcessRequest(std::get<RouteRequest>(pkt.payload), nodes[to], m_now,
                                          next);
                break;
            case PacketKind::RouteReply:
                replies.push_back(std::get<RouteReply>(pkt.payload));
                agents[to].ProcessReply(std::get<RouteReply>(pkt.payload), nodes[to], m_now,
                                        next);
                break;
            case PacketKind::Data:
                agents[to].ForwardData(std::move(pkt), nodes[to], m_now, next);
                break;
            case PacketKind::Hello:
                break;
            }
            Absorb(to, next, wire);
        }
    }

    void Send(NodeId src, NodeId dst, std::uint64_t uid)
    {
        DataPayload d;
        d.uid = uid;
        RoutingOutput out;
        agents[src].SendData(Packet::MakeData(src, dst, 512, m_now, d), nodes[src], m_now, out);
        Pump(src, std::move(out));
    }

    std::vector<NodeClusterState> nodes;
    std::vector<RoutingAgent> agents;

    std::vector<Packet> delivered;
    std::vector<std::pair<Packet, DropCause>> dropped;
    std::vector<std::vector<NodeId>> installed;
    std::vector<RouteReply> replies;
    std::vector<TimerRequest> timers;
    std::uint32_t duplicate_hops = 0;
    std::uint32_t transmissions = 0;
    std::uint32_t rreq_hops = 0;
    std::uint32_t link_failures = 0;

  private:
    void Absorb(NodeId at, RoutingOutput& out, std::deque<std::pair<NodeId, Packet>>& wire)
    {
        for (auto& p : out.transmit)
        {
            wire.emplace_back(at, std::move(p));
        }
        for (auto& p : out.delivered)
        {
            delivered.push_back(std::move(p));
        }
        for (auto& d : out.dropped_data)
        {
            dropped.push_back(std::move(d));
        }
        for (auto& r : out.installed)
        {
            installed.push_back(std::move(r));
        }
        for (auto& t : out.timers)
        {
            timers.push_back(t);
        }
        duplicate_hops += out.duplicate_hops;
    }

    std::vector<Position> m_pos;
    double m_range;
    Time m_now = 0.0;
};

/// Random unit-disc graph positions in a square; `connected` retries until
/// the graph is connected.
inline std::vector<Position>
RandomPositions(std::size_t n, double side, double range, std::mt19937_64& rng, bool connected)
{
    std::uniform_real_distribution<double> u(0.0, side);
    for (;;)
    {
        std::vector<Position> pos(n);
        for (auto& p : pos)
        {
            p = {u(rng), u(rng)};
        }
        if (!connected)
        {
            return pos;
        }
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        std::size_t count = 1;
        while (!stack.empty())
        {
            const auto a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < n; ++b)
            {
                if (!seen[b] && InRange(pos[a], pos[b], range))
                {
                    seen[b] = true;
                    ++count;
                    stack.push_back(b);
                }
            }
        }
        if (count == n)
        {
            return pos;
        }
    }
}

} // namespace cbrpsim::test

#endif // CBRPSIM_TESTS_HARNESS_H
