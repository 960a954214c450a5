// Discrete-event engine for one run.
//
// The medium is collision-free: each node serializes its own transmissions
// at link_rate and there is no propagation delay. Broadcasts reach every node
// inside tx_range at the instant the transmission completes; a unicast
// reaches its next hop only if it is in range at that instant.

#ifndef CBRPSIM_SIMULATOR_H
#define CBRPSIM_SIMULATOR_H

#include "cbrpsim/clustering.h"
#include "cbrpsim/event-queue.h"
#include "cbrpsim/interface-queue.h"
#include "cbrpsim/metrics.h"
#include "cbrpsim/mobility.h"
#include "cbrpsim/radio-channel.h"
#include "cbrpsim/routing.h"
#include "cbrpsim/scenario-config.h"
#include "cbrpsim/traffic.h"

#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace cbrpsim
{

struct SimulationOptions
{
    bool record_trace = false;
    bool record_route_events = false;
    /// 0 disables cluster snapshots.
    Time cluster_snapshot_period = 0.0;
};

struct RoleChangeRecord
{
    Time time = 0.0;
    NodeId node = 0;
    Role from = Role::Undecided;
    Role to = Role::Undecided;

    friend bool operator==(const RoleChangeRecord&, const RoleChangeRecord&) = default;
};

struct TraceRow
{
    Time time = 0.0;
    NodeId node = 0;
    EventKind kind = EventKind::HelloTimer;
    std::string detail;
};

struct ClusterSnapshotRow
{
    Time time = 0.0;
    NodeId node = 0;
    Role role = Role::Undecided;
    std::optional<NodeId> head;
    double mobility = 0.0;
};

struct InstalledRoute
{
    Time time = 0.0;
    std::vector<NodeId> hops;
};

class Simulation
{
  public:
    explicit Simulation(ScenarioConfig cfg, SimulationOptions options = {});
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Processes every event with time <= sim_duration, then reconciles the
    /// data-packet ledger. Callable once.
    void Run();

    const ScenarioConfig& Config() const { return m_cfg; }
    RunReport Report() const { return Finalize(m_ledger, m_cfg); }
    const MetricsLedger& Ledger() const { return m_ledger; }
    Time Now() const { return m_events.Now(); }

    std::size_t NodeCount() const { return m_nodes.size(); }
    const NodeClusterState& Cluster(NodeId id) const { return m_nodes.at(id).cluster; }
    const RoutingAgent& Routing(NodeId id) const { return m_nodes.at(id).routing; }
    Position PositionOf(NodeId id) const;
    const std::vector<Position>& InitialPositions() const { return m_initialPositions; }
    const std::vector<Flow>& Flows() const { return m_flows; }
    /// Tracks as they were at t = 0.
    const std::vector<MobilityTrack>& InitialTracks() const { return m_initialTracks; }

    const std::vector<RoleChangeRecord>& RoleChanges() const { return m_roleChanges; }
    const std::vector<InstalledRoute>& InstalledRoutes() const { return m_installed; }
    const std::vector<RouteEvent>& RouteEvents() const { return m_routeEvents; }
    const std::vector<TraceRow>& Trace() const { return m_trace; }
    const std::vector<ClusterSnapshotRow>& ClusterSnapshots() const { return m_snapshots; }
    /// Human-readable descriptions of every invariant breach, in order.
    const std::vector<std::string>& Violations() const { return m_violations; }

  private:
    struct Node
    {
        NodeClusterState cluster;
        RoutingAgent routing;
        MobilityTrack track;
        InterfaceQueue queue;
        std::optional<Packet> on_air;
        std::mt19937_64 hello_rng;
    };

    void Schedule(Time at, EventKind kind, NodeId node, decltype(Event::payload) payload = {});
    void Dispatch(Event& e);
    void OnHelloTimer(NodeId id);
    void OnExpiryScan(NodeId id);
    void OnTrafficEmit(const FlowTick& tick);
    void OnTransmitComplete(NodeId id);
    void OnDelivery(NodeId id, Packet& packet);
    void OnDiscoveryTimeout(NodeId id, const DiscoveryTimer& timer);

    void Enqueue(NodeId id, Packet packet);
    void TryTransmit(NodeId id);
    void HandleClusterUpdate(NodeId id, const ClusterUpdate& update);
    void HandleRoutingOutput(NodeId id, RoutingOutput& out);
    void DropData(const Packet& packet, DropCause cause);
    void Violation(std::string what);
    void TakeSnapshot(Time t);
    void Reconcile();

    ScenarioConfig m_cfg;
    SimulationOptions m_options;
    ChannelModel m_channel;
    std::mt19937_64 m_fadingRng;
    EventQueue m_events;
    std::vector<Node> m_nodes;
    std::vector<Position> m_initialPositions;
    std::vector<MobilityTrack> m_initialTracks;
    std::vector<Flow> m_flows;
    std::vector<std::uint64_t> m_flowEmissions;
    std::uint64_t m_nextUid = 0;
    std::uint64_t m_dataInTransit = 0;
    Time m_nextSnapshot = kForever;
    bool m_ran = false;

    MetricsLedger m_ledger;
    std::vector<RoleChangeRecord> m_roleChanges;
    std::vector<InstalledRoute> m_installed;
    std::vector<RouteEvent> m_routeEvents;
    std::vector<TraceRow> m_trace;
    std::vector<ClusterSnapshotRow> m_snapshots;
    std::vector<std::string> m_violations;
};

void WriteEventTrace(std::ostream& out, const std::vector<TraceRow>& rows);
void WriteClusterSnapshots(std::ostream& out, const std::vector<ClusterSnapshotRow>& rows);
/// `time,event,flow_id,route_len`; flow ids are looked up from the flow table.
void WriteRouteEvents(std::ostream& out, const std::vector<RouteEvent>& events,
                      const std::vector<Flow>& flows);

} // namespace cbrpsim

#endif // CBRPSIM_SIMULATOR_H
