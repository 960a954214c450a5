#include "cbrpsim/metrics.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace cbrpsim
{

void
MetricsLedger::RecordRoleChange(NodeId, Role oldRole, Role newRole, Time now)
{
    const bool wasHead = oldRole == Role::ClusterHead;
    const bool isHead = newRole == Role::ClusterHead;
    if (wasHead != isHead && now > formation_grace)
    {
        ++ch_changes;
    }
}

void
MetricsLedger::RecordDelivery(std::uint32_t bytes, double latency)
{
    ++data_delivered;
    delivered_bytes += bytes;
    latencies.push_back(latency);
}

void
MetricsLedger::RecordDrop(DropCause cause)
{
    switch (cause)
    {
    case DropCause::InterfaceQueue:
        ++drops_queue;
        break;
    case DropCause::NoRoute:
        ++drops_no_route;
        break;
    case DropCause::ForwardingFailure:
        ++drops_forwarding;
        break;
    }
}

void
MetricsLedger::RecordControlSent(PacketKind kind)
{
    ++control_packets_sent;
    switch (kind)
    {
    case PacketKind::Hello:
        ++hello_sent;
        break;
    case PacketKind::RouteRequest:
        ++rreq_sent;
        break;
    case PacketKind::RouteReply:
        ++rrep_sent;
        break;
    case PacketKind::Data:
        break;
    }
}

RunReport
Finalize(const MetricsLedger& l, const ScenarioConfig& cfg)
{
    RunReport r;
    r.protocol = cfg.protocol;
    r.seed = cfg.rng_seed;
    r.max_speed = cfg.max_speed;
    r.packet_rate = cfg.packet_rate;
    r.ch_changes = l.ch_changes;
    r.ch_changes_per_s = static_cast<double>(l.ch_changes) / cfg.sim_duration;
    if (l.data_sent > 0)
    {
        r.pdr = static_cast<double>(l.data_delivered) / static_cast<double>(l.data_sent);
    }
    r.throughput_bps = static_cast<double>(l.delivered_bytes) * 8.0 / cfg.sim_duration;
    r.throughput_pps = static_cast<double>(l.data_delivered) / cfg.sim_duration;
    r.overhead_pkts = l.control_packets_sent;
    if (!l.latencies.empty())
    {
        r.mean_delay_s = std::accumulate(l.latencies.begin(), l.latencies.end(), 0.0) /
                         static_cast<double>(l.latencies.size());
    }
    r.data_sent = l.data_sent;
    r.data_delivered = l.data_delivered;
    r.drops_queue = l.drops_queue;
    r.drops_no_route = l.drops_no_route;
    r.drops_forwarding = l.drops_forwarding;
    r.in_flight = l.in_flight_at_horizon;
    r.control_dropped = l.control_dropped;
    r.invariant_violations = l.invariant_violations;
    r.config = cfg;
    return r;
}

const std::vector<std::string>&
SummaryMetricNames()
{
    static const std::vector<std::string> names = {
        "ch_changes", "pdr", "throughput_bps", "throughput_pps", "overhead_pkts", "mean_delay_s",
    };
    return names;
}

std::optional<double>
MetricValue(const RunReport& r, const std::string& name)
{
    if (name == "ch_changes")
    {
        return static_cast<double>(r.ch_changes);
    }
    if (name == "pdr")
    {
        return r.pdr;
    }
    if (name == "throughput_bps")
    {
        return r.throughput_bps;
    }
    if (name == "throughput_pps")
    {
        return r.throughput_pps;
    }
    if (name == "overhead_pkts")
    {
        return static_cast<double>(r.overhead_pkts);
    }
    if (name == "mean_delay_s")
    {
        return r.mean_delay_s;
    }
    throw std::invalid_argument("unknown metric '" + name + "'");
}

namespace
{

MetricStat
Stat(const std::vector<double>& v)
{
    MetricStat s;
    s.n = v.size();
    if (v.empty())
    {
        s.mean = std::nan("");
        return s;
    }
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() >= 2)
    {
        double ss = 0.0;
        for (double x : v)
        {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

ScenarioConfig
Normalized(ScenarioConfig c)
{
    c.rng_seed = 0;
    c.protocol = Protocol::Cbrp;
    return c;
}

} // namespace

SummaryReport
Aggregate(std::span<const RunReport> reports)
{
    if (reports.empty())
    {
        throw AggregateError("cannot aggregate an empty set of reports");
    }
    const auto reference = Normalized(reports.front().config);
    for (const auto& r : reports)
    {
        if (!(Normalized(r.config) == reference))
        {
            throw AggregateError("reports come from heterogeneous configurations");
        }
    }

    SummaryReport out;
    std::map<Protocol, std::vector<const RunReport*>> byProtocol;
    std::map<Protocol, std::map<std::uint64_t, const RunReport*>> bySeed;
    for (const auto& r : reports)
    {
        byProtocol[r.protocol].push_back(&r);
        bySeed[r.protocol].try_emplace(r.seed, &r);
    }
    for (const auto& [protocol, runs] : byProtocol)
    {
        for (const auto& name : SummaryMetricNames())
        {
            std::vector<double> values;
            for (const RunReport* r : runs)
            {
                if (auto v = MetricValue(*r, name))
                {
                    values.push_back(*v);
                }
            }
            out.by_protocol[protocol][name] = Stat(values);
        }
    }

    if (bySeed.count(Protocol::Cbrp) && bySeed.count(Protocol::CrossCbrp))
    {
        const auto& base = bySeed.at(Protocol::Cbrp);
        const auto& cross = bySeed.at(Protocol::CrossCbrp);
        std::map<std::string, std::vector<double>> deltas;
        for (const auto& [seed, c] : cross)
        {
            auto b = base.find(seed);
            if (b == base.end())
            {
                continue;
            }
            PairedRow row;
            row.seed = seed;
            for (const auto& name : SummaryMetricNames())
            {
                auto vb = MetricValue(*b->second, name);
                auto vc = MetricValue(*c, name);
                if (vb && vc)
                {
                    row.delta[name] = *vc - *vb;
                    deltas[name].push_back(*vc - *vb);
                }
            }
            out.paired.push_back(std::move(row));
        }
        for (const auto& [name, d] : deltas)
        {
            out.mean_delta[name] = Stat(d).mean;
        }
        for (const auto& name : SummaryMetricNames())
        {
            const auto& sb = out.by_protocol[Protocol::Cbrp][name];
            const auto& sc = out.by_protocol[Protocol::CrossCbrp][name];
            if (sb.n > 0 && sc.n > 0 && sb.mean != 0.0)
            {
                out.mean_change_pct[name] = 100.0 * (sc.mean - sb.mean) / sb.mean;
            }
        }
    }
    return out;
}

std::string
FormatNumber(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string
RunReportCsvHeader()
{
    return "protocol,seed,max_speed,packet_rate,ch_changes,pdr,throughput_bps,overhead_pkts,"
           "mean_delay_s,drops_queue,drops_no_route,drops_forwarding,in_flight,data_sent,"
           "data_delivered,throughput_pps,ch_changes_per_s,control_dropped,invariant_violations";
}

std::string
ToCsvRow(const RunReport& r)
{
    auto opt = [](const std::optional<double>& v) { return v ? FormatNumber(*v) : "NA"; };
    std::ostringstream o;
    o << ToString(r.protocol) << ',' << r.seed << ',' << FormatNumber(r.max_speed) << ','
      << FormatNumber(r.packet_rate) << ',' << r.ch_changes << ',' << opt(r.pdr) << ','
      << FormatNumber(r.throughput_bps) << ',' << r.overhead_pkts << ',' << opt(r.mean_delay_s)
      << ',' << r.drops_queue << ',' << r.drops_no_route << ',' << r.drops_forwarding << ','
      << r.in_flight << ',' << r.data_sent << ',' << r.data_delivered << ','
      << FormatNumber(r.throughput_pps) << ',' << FormatNumber(r.ch_changes_per_s) << ','
      << r.control_dropped << ',' << r.invariant_violations;
    return o.str();
}

RunReport
ParseRunReportRow(const std::string& line)
{
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
        f.push_back(cell);
    }
    if (f.size() != 19)
    {
        throw std::invalid_argument("runs.csv row has " + std::to_string(f.size()) +
                                    " fields, expected 19");
    }
    auto u = [](const std::string& s) { return std::stoull(s); };
    auto d = [](const std::string& s) { return std::stod(s); };
    auto opt = [&](const std::string& s) -> std::optional<double> {
        if (s == "NA")
        {
            return std::nullopt;
        }
        return d(s);
    };
    RunReport r;
    r.protocol = ParseProtocol(f[0]);
    r.seed = u(f[1]);
    r.max_speed = d(f[2]);
    r.packet_rate = d(f[3]);
    r.ch_changes = u(f[4]);
    r.pdr = opt(f[5]);
    r.throughput_bps = d(f[6]);
    r.overhead_pkts = u(f[7]);
    r.mean_delay_s = opt(f[8]);
    r.drops_queue = u(f[9]);
    r.drops_no_route = u(f[10]);
    r.drops_forwarding = u(f[11]);
    r.in_flight = u(f[12]);
    r.data_sent = u(f[13]);
    r.data_delivered = u(f[14]);
    r.throughput_pps = d(f[15]);
    r.ch_changes_per_s = d(f[16]);
    r.control_dropped = u(f[17]);
    r.invariant_violations = u(f[18]);
    return r;
}

} // namespace cbrpsim
