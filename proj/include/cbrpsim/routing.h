// Cluster-based source routing: route requests travel only between cluster
// heads (through gateways), replies retrace the recorded route, and data
// carries the full hop list.

#ifndef CBRPSIM_ROUTING_H
#define CBRPSIM_ROUTING_H

#include "cbrpsim/clustering.h"
#include "cbrpsim/packet.h"
#include "cbrpsim/types.h"

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace cbrpsim
{

struct RoutingParams
{
    Time rreq_timeout = 2.0;
    std::uint32_t max_retries = 3;
    std::size_t pending_capacity = 10;
};

enum class DropCause : std::uint8_t
{
    InterfaceQueue,
    NoRoute,
    ForwardingFailure,
};

enum class RouteEventKind : std::uint8_t
{
    RreqSent,
    RrepRecv,
    RouteBreak,
    Delivery,
};

std::string_view ToString(RouteEventKind kind);

struct RouteEvent
{
    Time time = 0.0;
    RouteEventKind kind = RouteEventKind::RreqSent;
    NodeId source = 0;
    NodeId target = 0;
    std::size_t route_len = 0;
};

struct TimerRequest
{
    Time at = 0.0;
    NodeId target = 0;
    std::uint64_t generation = 0;
};

/// Everything one routing step asks of the engine.
struct RoutingOutput
{
    std::vector<Packet> transmit;
    std::vector<Packet> delivered;
    std::vector<std::pair<Packet, DropCause>> dropped_data;
    std::uint32_t dropped_control = 0;
    std::vector<TimerRequest> timers;
    std::vector<RouteEvent> events;
    /// Routes installed at this node as a source.
    std::vector<std::vector<NodeId>> installed;
    /// (source, destination) whose cached route was seen broken here.
    std::vector<std::pair<NodeId, NodeId>> broken;
    /// Recorded routes observed with a repeated hop (must stay empty).
    std::uint32_t duplicate_hops = 0;
};

struct CachedRoute
{
    std::vector<NodeId> hops;
    Time created_at = 0.0;
};

enum class OriginateStatus : std::uint8_t
{
    Sent,
    AnsweredLocally,
    NoClusterHead,
};

/// For a head: the explicit hop sequence to each neighboring cluster head not
/// excluded by `recorded`, preferring direct links, then one gateway, then a
/// gateway pair, lowest ids first.
std::map<NodeId, std::vector<NodeId>>
NeighboringClusterPaths(const NodeClusterState& head, const std::vector<NodeId>& recorded);

class RoutingAgent
{
  public:
    RoutingAgent(NodeId self, RoutingParams params);

    NodeId Id() const { return m_self; }

    /// Application data at its source: sent on a cached route, or buffered
    /// while a discovery runs.
    void SendData(Packet data, const NodeClusterState& cluster, Time now, RoutingOutput& out);

    OriginateStatus OriginateRequest(NodeId target, const NodeClusterState& cluster, Time now,
                                     RoutingOutput& out);
    void ProcessRequest(RouteRequest rreq, const NodeClusterState& cluster, Time now,
                        RoutingOutput& out);
    void ProcessReply(RouteReply rrep, const NodeClusterState& cluster, Time now,
                      RoutingOutput& out);
    /// Throws std::logic_error if this node is not on the packet's route.
    void ForwardData(Packet data, const NodeClusterState& cluster, Time now, RoutingOutput& out);

    /// Retries the discovery if it is still the current one; drops the
    /// pending data once retries are exhausted.
    void OnDiscoveryTimeout(NodeId target, std::uint64_t generation,
                            const NodeClusterState& cluster, Time now, RoutingOutput& out);

    void InvalidateRoute(NodeId dst);

    const std::map<NodeId, CachedRoute>& Cache() const { return m_cache; }
    bool DiscoveryActive(NodeId target) const { return m_discoveries.count(target) != 0; }
    std::size_t PendingCount() const;
    std::size_t PendingCount(NodeId target) const;

  private:
    struct Discovery
    {
        std::uint32_t attempts = 0;
        std::uint64_t generation = 0;
    };

    void StartDiscovery(NodeId target, const NodeClusterState& cluster, Time now,
                        RoutingOutput& out);
    void InstallRoute(std::vector<NodeId> hops, const NodeClusterState& cluster, Time now,
                      RoutingOutput& out);
    bool SendOnRoute(Packet& data, const NodeClusterState& cluster, Time now,
                     RoutingOutput& out);
    void ForwardFromHead(RouteRequest rreq, const NodeClusterState& cluster, Time now,
                         RoutingOutput& out);
    void Reply(const RouteRequest& rreq, std::vector<NodeId> route,
               const NodeClusterState& cluster, Time now, RoutingOutput& out);

    NodeId m_self;
    RoutingParams m_params;
    std::uint32_t m_nextSequence = 0;
    std::uint64_t m_nextGeneration = 0;
    std::map<NodeId, CachedRoute> m_cache;
    std::map<NodeId, std::deque<Packet>> m_pending;
    std::map<NodeId, Discovery> m_discoveries;
    /// (request, head the copy was heading to) already handled here.
    std::set<std::pair<RequestId, NodeId>> m_seen;
};

} // namespace cbrpsim

#endif // CBRPSIM_ROUTING_H
