#include "cbrpsim/traffic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cbrpsim
{

std::vector<Flow>
GenerateFlows(const ScenarioConfig& cfg, std::mt19937_64& rng)
{
    const std::uint32_t count = cfg.FlowCount();
    std::vector<Flow> flows;
    flows.reserve(count);
    std::uniform_real_distribution<double> offset(0.0, 1.0 / cfg.packet_rate);

    if (!cfg.allow_shared_endpoints)
    {
        if (2 * std::uint64_t{count} > cfg.node_count)
        {
            throw ConfigError("cannot place " + std::to_string(count) +
                              " flows on disjoint endpoints with " +
                              std::to_string(cfg.node_count) + " nodes");
        }
        std::vector<NodeId> ids(cfg.node_count);
        std::iota(ids.begin(), ids.end(), NodeId{0});
        // Fisher-Yates with an explicit draw so the permutation does not
        // depend on the standard library's shuffle.
        for (std::size_t i = ids.size() - 1; i > 0; --i)
        {
            std::uniform_int_distribution<std::size_t> pick(0, i);
            std::swap(ids[i], ids[pick(rng)]);
        }
        for (std::uint32_t f = 0; f < count; ++f)
        {
            flows.push_back(Flow{f, ids[2 * f], ids[2 * f + 1], cfg.packet_rate, cfg.packet_size,
                                 0.0});
        }
    }
    else
    {
        std::uniform_int_distribution<NodeId> pick(0, cfg.node_count - 1);
        for (std::uint32_t f = 0; f < count; ++f)
        {
            const NodeId src = pick(rng);
            NodeId dst = pick(rng);
            while (dst == src)
            {
                dst = pick(rng);
            }
            flows.push_back(Flow{f, src, dst, cfg.packet_rate, cfg.packet_size, 0.0});
        }
    }
    for (auto& f : flows)
    {
        f.start_time = cfg.traffic_start_time + offset(rng);
    }
    return flows;
}

std::uint64_t
EmissionCount(const Flow& flow, Time horizon)
{
    if (flow.start_time >= horizon)
    {
        return 0;
    }
    // Emissions at start + k / rate, k = 0, 1, ... while < horizon; counted
    // the same way the engine schedules them.
    std::uint64_t n = 0;
    for (Time t = flow.start_time; t < horizon; t = flow.start_time + (n * flow.Period()))
    {
        ++n;
    }
    return n;
}

void
WriteFlowTable(std::ostream& out, const std::vector<Flow>& flows)
{
    out << "flow_id,src,dst,rate_pps,packet_size,start_time\n";
    for (const auto& f : flows)
    {
        out << f.flow_id << ',' << f.src << ',' << f.dst << ',' << f.rate << ',' << f.packet_size
            << ',' << f.start_time << '\n';
    }
}

} // namespace cbrpsim
