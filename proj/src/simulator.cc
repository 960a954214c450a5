#include "cbrpsim/simulator.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace cbrpsim
{

namespace
{

std::string_view
KindName(PacketKind k)
{
    switch (k)
    {
    case PacketKind::Hello:
        return "hello";
    case PacketKind::RouteRequest:
        return "rreq";
    case PacketKind::RouteReply:
        return "rrep";
    case PacketKind::Data:
        return "data";
    }
    return "?";
}

std::string
Describe(const Packet& p)
{
    std::string s(KindName(p.kind));
    s += ' ';
    s += std::to_string(p.src);
    s += "->";
    s += p.next_hop == kBroadcast ? std::string("*") : std::to_string(p.next_hop);
    return s;
}

} // namespace

namespace
{

ScenarioConfig
Validated(ScenarioConfig cfg)
{
    Validate(cfg);
    return cfg;
}

} // namespace

Simulation::Simulation(ScenarioConfig cfg, SimulationOptions options)
    : m_cfg(Validated(std::move(cfg))),
      m_options(options),
      m_channel(ChannelModel::FromConfig(m_cfg)),
      m_fadingRng(MakeRng(m_cfg.rng_seed, RngStream::Fading))
{
    m_ledger.formation_grace = m_cfg.FormationGrace();

    auto placementRng = MakeRng(m_cfg.rng_seed, RngStream::Placement);
    m_initialPositions = GenerateInitialPlacement(m_cfg, placementRng);

    const ClusteringParams clustering{m_cfg.protocol, m_cfg.neighbor_timeout_TP,
                                      m_cfg.hello_interval_BI};
    const RoutingParams routing{m_cfg.rreq_timeout, m_cfg.max_retries, m_cfg.pending_capacity};
    m_nodes.reserve(m_cfg.node_count);
    for (NodeId i = 0; i < m_cfg.node_count; ++i)
    {
        MobilityTrack track(m_initialPositions[i], m_cfg, MakeRng(m_cfg.rng_seed, RngStream::Mobility, i));
        m_initialTracks.push_back(track);
        m_nodes.push_back(Node{NodeClusterState(i, clustering), RoutingAgent(i, routing),
                               std::move(track), InterfaceQueue(m_cfg.queue_capacity),
                               std::nullopt, MakeRng(m_cfg.rng_seed, RngStream::HelloJitter, i)});
    }

    auto trafficRng = MakeRng(m_cfg.rng_seed, RngStream::Traffic);
    m_flows = GenerateFlows(m_cfg, trafficRng);
    m_flowEmissions.assign(m_flows.size(), 0);

    for (NodeId i = 0; i < m_cfg.node_count; ++i)
    {
        auto& n = m_nodes[i];
        std::uniform_real_distribution<double> offset(0.0, m_cfg.hello_interval_BI);
        Schedule(offset(n.hello_rng), EventKind::HelloTimer, i);
        Schedule(m_cfg.hello_interval_BI / 2.0, EventKind::NeighborExpiryScan, i);
        const Time arrival = n.track.CurrentLeg().pause_until;
        if (arrival != kForever)
        {
            Schedule(arrival, EventKind::WaypointArrival, i);
        }
    }
    for (const auto& f : m_flows)
    {
        Schedule(f.start_time, EventKind::TrafficEmit, f.src, FlowTick{f.flow_id});
    }
    if (m_options.cluster_snapshot_period > 0.0)
    {
        m_nextSnapshot = 0.0;
    }
}

void
Simulation::Schedule(Time at, EventKind kind, NodeId node, decltype(Event::payload) payload)
{
    Event e;
    e.time = at;
    e.kind = kind;
    e.node = node;
    e.payload = std::move(payload);
    m_events.Schedule(std::move(e));
}

Position
Simulation::PositionOf(NodeId id) const
{
    return m_nodes.at(id).track.PositionAt(Now());
}

void
Simulation::Run()
{
    if (m_ran)
    {
        throw std::logic_error("Simulation::Run called twice");
    }
    m_ran = true;
    const Time horizon = m_cfg.sim_duration;
    while (!m_events.Empty() && m_events.Top().time <= horizon)
    {
        while (m_nextSnapshot <= m_events.Top().time)
        {
            TakeSnapshot(m_nextSnapshot);
            m_nextSnapshot += m_options.cluster_snapshot_period;
        }
        Event e = m_events.Pop();
        if (m_options.record_trace)
        {
            std::string detail;
            if (const auto* p = std::get_if<Packet>(&e.payload))
            {
                detail = Describe(*p);
            }
            m_trace.push_back({e.time, e.node, e.kind, std::move(detail)});
        }
        Dispatch(e);
    }
    Reconcile();
}

void
Simulation::Dispatch(Event& e)
{
    switch (e.kind)
    {
    case EventKind::HelloTimer:
        OnHelloTimer(e.node);
        break;
    case EventKind::NeighborExpiryScan:
        OnExpiryScan(e.node);
        break;
    case EventKind::WaypointArrival: {
        auto& track = m_nodes[e.node].track;
        track.Advance(e.time);
        Schedule(track.CurrentLeg().pause_until, EventKind::WaypointArrival, e.node);
        break;
    }
    case EventKind::TrafficEmit:
        OnTrafficEmit(std::get<FlowTick>(e.payload));
        break;
    case EventKind::TransmitComplete:
        OnTransmitComplete(e.node);
        break;
    case EventKind::PacketDelivery:
        OnDelivery(e.node, std::get<Packet>(e.payload));
        break;
    case EventKind::DiscoveryTimeout:
        OnDiscoveryTimeout(e.node, std::get<DiscoveryTimer>(e.payload));
        break;
    }
}

void
Simulation::OnHelloTimer(NodeId id)
{
    auto& n = m_nodes[id];
    Enqueue(id, Packet::MakeHello(n.cluster.BuildHello(), Now()));
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    Schedule(Now() + m_cfg.hello_interval_BI * (1.0 + jitter(n.hello_rng)), EventKind::HelloTimer,
             id);
}

void
Simulation::OnExpiryScan(NodeId id)
{
    const auto update = m_nodes[id].cluster.ExpireNeighbors(Now());
    HandleClusterUpdate(id, update);
    Schedule(Now() + m_cfg.hello_interval_BI / 2.0, EventKind::NeighborExpiryScan, id);
}

void
Simulation::OnTrafficEmit(const FlowTick& tick)
{
    const Flow& f = m_flows.at(tick.flow_id);
    DataPayload payload;
    payload.uid = m_nextUid++;
    payload.flow_id = f.flow_id;
    Packet p = Packet::MakeData(f.src, f.dst, f.packet_size, Now(), std::move(payload));
    ++m_ledger.data_sent;

    RoutingOutput out;
    m_nodes[f.src].routing.SendData(std::move(p), m_nodes[f.src].cluster, Now(), out);
    HandleRoutingOutput(f.src, out);

    const auto k = ++m_flowEmissions[f.flow_id];
    Schedule(f.start_time + static_cast<double>(k) * f.Period(), EventKind::TrafficEmit, f.src,
             FlowTick{f.flow_id});
}

void
Simulation::Enqueue(NodeId id, Packet packet)
{
    auto& n = m_nodes[id];
    auto outcome = n.queue.Enqueue(std::move(packet));
    if (outcome.dropped)
    {
        if (outcome.dropped->IsControl())
        {
            ++m_ledger.control_dropped;
        }
        else
        {
            DropData(*outcome.dropped, DropCause::InterfaceQueue);
        }
    }
    if (!n.queue.InvariantsHold())
    {
        Violation("interface queue ordering/capacity at node " + std::to_string(id));
    }
    TryTransmit(id);
}

void
Simulation::TryTransmit(NodeId id)
{
    auto& n = m_nodes[id];
    if (n.on_air || n.queue.Empty())
    {
        return;
    }
    Packet p = *n.queue.Dequeue();
    if (p.IsControl())
    {
        m_ledger.RecordControlSent(p.kind);
    }
    const Time duration = static_cast<double>(p.size_bytes) * 8.0 / m_cfg.link_rate;
    n.on_air = std::move(p);
    Schedule(Now() + duration, EventKind::TransmitComplete, id);
}

void
Simulation::OnTransmitComplete(NodeId id)
{
    auto& n = m_nodes[id];
    Packet p = std::move(*n.on_air);
    n.on_air.reset();
    const Position here = n.track.PositionAt(Now());

    if (p.next_hop == kBroadcast)
    {
        for (NodeId j = 0; j < m_nodes.size(); ++j)
        {
            if (j != id && InRange(here, m_nodes[j].track.PositionAt(Now()), m_cfg.tx_range))
            {
                Schedule(Now(), EventKind::PacketDelivery, j, p);
            }
        }
    }
    else if (InRange(here, m_nodes.at(p.next_hop).track.PositionAt(Now()), m_cfg.tx_range))
    {
        if (!p.IsControl())
        {
            ++m_dataInTransit;
        }
        const NodeId to = p.next_hop;
        Schedule(Now(), EventKind::PacketDelivery, to, std::move(p));
    }
    else if (p.IsControl())
    {
        ++m_ledger.control_dropped;
    }
    else
    {
        const auto& payload = std::get<DataPayload>(p.payload);
        if (m_options.record_route_events)
        {
            m_routeEvents.push_back(
                {Now(), RouteEventKind::RouteBreak, p.src, p.dst, payload.route.size()});
        }
        m_nodes[p.src].routing.InvalidateRoute(p.dst);
        DropData(p, DropCause::ForwardingFailure);
    }
    TryTransmit(id);
}

void
Simulation::OnDelivery(NodeId id, Packet& p)
{
    auto& n = m_nodes[id];
    RoutingOutput out;
    switch (p.kind)
    {
    case PacketKind::Hello: {
        const auto& hello = std::get<HelloPacket>(p.payload);
        const double d = Distance(m_nodes[hello.sender].track.PositionAt(Now()),
                                  n.track.PositionAt(Now()));
        const double rx = ReceivedPower(m_channel, m_cfg.tx_power, std::max(d, m_channel.d0),
                                        &m_fadingRng);
        HandleClusterUpdate(id, n.cluster.OnHelloReceived(hello, rx, Now()));
        return;
    }
    case PacketKind::RouteRequest:
        n.routing.ProcessRequest(std::get<RouteRequest>(std::move(p.payload)), n.cluster, Now(),
                                 out);
        break;
    case PacketKind::RouteReply:
        n.routing.ProcessReply(std::get<RouteReply>(std::move(p.payload)), n.cluster, Now(), out);
        break;
    case PacketKind::Data:
        --m_dataInTransit;
        n.routing.ForwardData(std::move(p), n.cluster, Now(), out);
        break;
    }
    HandleRoutingOutput(id, out);
}

void
Simulation::OnDiscoveryTimeout(NodeId id, const DiscoveryTimer& timer)
{
    auto& n = m_nodes[id];
    RoutingOutput out;
    n.routing.OnDiscoveryTimeout(timer.target, timer.generation, n.cluster, Now(), out);
    HandleRoutingOutput(id, out);
}

void
Simulation::HandleClusterUpdate(NodeId id, const ClusterUpdate& update)
{
    auto& n = m_nodes[id];
    if (update.RoleChanged())
    {
        m_ledger.RecordRoleChange(id, update.old_role, update.new_role, Now());
        m_roleChanges.push_back({Now(), id, update.old_role, update.new_role});
    }
    if (!n.cluster.InvariantsHold())
    {
        Violation("cluster state at node " + std::to_string(id));
    }
    if (update.trigger_hello)
    {
        Enqueue(id, Packet::MakeHello(n.cluster.BuildHello(), Now()));
    }
}

void
Simulation::HandleRoutingOutput(NodeId id, RoutingOutput& out)
{
    for (auto& [p, cause] : out.dropped_data)
    {
        DropData(p, cause);
    }
    m_ledger.control_dropped += out.dropped_control;
    for (const auto& p : out.delivered)
    {
        m_ledger.RecordDelivery(p.size_bytes, Now() - p.created_at);
    }
    for (const auto& t : out.timers)
    {
        Schedule(t.at, EventKind::DiscoveryTimeout, id, DiscoveryTimer{t.target, t.generation});
    }
    for (auto& hops : out.installed)
    {
        m_installed.push_back({Now(), std::move(hops)});
    }
    for (const auto& [src, dst] : out.broken)
    {
        m_nodes[src].routing.InvalidateRoute(dst);
    }
    if (out.duplicate_hops > 0)
    {
        Violation("recorded route with repeated hop at node " + std::to_string(id));
    }
    if (m_options.record_route_events)
    {
        m_routeEvents.insert(m_routeEvents.end(), out.events.begin(), out.events.end());
    }
    for (auto& p : out.transmit)
    {
        Enqueue(id, std::move(p));
    }
}

void
Simulation::DropData(const Packet&, DropCause cause)
{
    m_ledger.RecordDrop(cause);
}

void
Simulation::Violation(std::string what)
{
    ++m_ledger.invariant_violations;
    char prefix[48];
    std::snprintf(prefix, sizeof(prefix), "t=%.6f ", Now());
    m_violations.push_back(prefix + std::move(what));
}

void
Simulation::TakeSnapshot(Time t)
{
    for (NodeId i = 0; i < m_nodes.size(); ++i)
    {
        const auto& c = m_nodes[i].cluster;
        std::optional<NodeId> head;
        if (!c.Heads().empty())
        {
            head = *c.Heads().begin();
        }
        m_snapshots.push_back({t, i, c.GetRole(), head, c.Mobility()});
    }
}

void
Simulation::Reconcile()
{
    std::uint64_t inFlight = m_dataInTransit;
    for (const auto& n : m_nodes)
    {
        inFlight += n.routing.PendingCount();
        for (const auto& p : n.queue.Slots())
        {
            inFlight += p.IsControl() ? 0 : 1;
        }
        if (n.on_air && !n.on_air->IsControl())
        {
            ++inFlight;
        }
    }
    m_ledger.in_flight_at_horizon = inFlight;
    if (m_ledger.data_sent != m_ledger.data_delivered + m_ledger.DropsTotal() + inFlight)
    {
        Violation("packet conservation: sent " + std::to_string(m_ledger.data_sent) +
                  " != delivered + dropped + in flight");
    }
    if (m_ledger.latencies.size() != m_ledger.data_delivered)
    {
        Violation("latency sample count differs from deliveries");
    }
}

void
WriteEventTrace(std::ostream& out, const std::vector<TraceRow>& rows)
{
    out << "time,node,event_kind,detail\n";
    char buf[64];
    for (const auto& r : rows)
    {
        std::snprintf(buf, sizeof(buf), "%.9f", r.time);
        out << buf << ',' << r.node << ',' << ToString(r.kind) << ',' << r.detail << '\n';
    }
}

void
WriteClusterSnapshots(std::ostream& out, const std::vector<ClusterSnapshotRow>& rows)
{
    out << "time,node,role,head_id,M_value\n";
    char buf[64];
    for (const auto& r : rows)
    {
        std::snprintf(buf, sizeof(buf), "%.6f", r.time);
        out << buf << ',' << r.node << ',' << ToString(r.role) << ',';
        if (r.head)
        {
            out << *r.head;
        }
        std::snprintf(buf, sizeof(buf), "%.9g", r.mobility);
        out << ',' << buf << '\n';
    }
}

void
WriteRouteEvents(std::ostream& out, const std::vector<RouteEvent>& events,
                 const std::vector<Flow>& flows)
{
    std::map<std::pair<NodeId, NodeId>, std::uint32_t> flowOf;
    for (const auto& f : flows)
    {
        flowOf.emplace(std::make_pair(f.src, f.dst), f.flow_id);
    }
    out << "time,event,flow_id,route_len\n";
    char buf[64];
    for (const auto& e : events)
    {
        std::snprintf(buf, sizeof(buf), "%.9f", e.time);
        out << buf << ',' << ToString(e.kind) << ',';
        if (auto it = flowOf.find({e.source, e.target}); it != flowOf.end())
        {
            out << it->second;
        }
        out << ',' << e.route_len << '\n';
    }
}

} // namespace cbrpsim
