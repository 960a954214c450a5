// Constant-bit-rate flows over randomly chosen endpoints.

#ifndef CBRPSIM_TRAFFIC_H
#define CBRPSIM_TRAFFIC_H

#include "cbrpsim/scenario-config.h"
#include "cbrpsim/types.h"

#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

namespace cbrpsim
{

struct Flow
{
    std::uint32_t flow_id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double rate = 0.0;
    std::uint32_t packet_size = 0;
    Time start_time = 0.0;

    Time Period() const { return 1.0 / rate; }
};

/// Disjoint endpoint pairs unless cfg.allow_shared_endpoints. Start times are
/// traffic_start_time plus a uniform offset in [0, 1/rate). Throws ConfigError
/// when 2 * flow_count > node_count with disjoint endpoints.
std::vector<Flow> GenerateFlows(const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Emission times of one flow inside [0, horizon).
std::uint64_t EmissionCount(const Flow& flow, Time horizon);

void WriteFlowTable(std::ostream& out, const std::vector<Flow>& flows);

} // namespace cbrpsim

#endif // CBRPSIM_TRAFFIC_H
