// Experiment description: defaults, key=value parsing, validation and
// seeded topology generation.

#ifndef CBRPSIM_SCENARIO_CONFIG_H
#define CBRPSIM_SCENARIO_CONFIG_H

#include "cbrpsim/types.h"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cbrpsim
{

class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig
{
    std::uint32_t node_count = 100;
    double area_width = 1000.0;
    double area_height = 1000.0;
    double max_speed = 20.0;
    double min_speed = 0.1;
    Time pause_time = 0.0;
    double tx_range = 250.0;
    Time sim_duration = 300.0;
    Protocol protocol = Protocol::CrossCbrp;
    Time hello_interval_BI = 2.0;
    Time neighbor_timeout_TP = 6.0;
    /// Unset means min(50, node_count / 2), resolved by Resolved().
    std::optional<std::uint32_t> flow_count;
    double packet_rate = 4.0;
    std::uint32_t packet_size = 512;
    std::uint32_t queue_capacity = 50;
    double link_rate = 2e6;
    double path_loss_exponent_n = 2.0;
    double tx_power = 1.0;
    double reference_distance_d0 = 1.0;
    double close_in_gain_L_d0 = 1.0;
    bool fading_enabled = false;
    std::uint64_t rng_seed = 0;
    std::uint32_t replications = 5;

    bool allow_shared_endpoints = false;
    /// Freezes every node at its initial placement.
    bool hold_positions = false;
    Time traffic_start_time = 0.0;
    Time rreq_timeout = 2.0;
    std::uint32_t max_retries = 3;
    std::uint32_t pending_capacity = 10;
    /// Unset means 2 * BI + TP.
    std::optional<Time> formation_grace;

    std::uint32_t FlowCount() const;
    Time FormationGrace() const;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ConfigError naming the first violated constraint.
void Validate(const ScenarioConfig& cfg);

/// Applies one key=value assignment. Throws ConfigError for unknown keys or bad values.
void ApplyKey(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Parses config-file text. Unspecified keys keep their defaults. The
/// result is validated.
ScenarioConfig ParseConfig(std::string_view text);

/// Parses file text, applies overrides in order, then validates.
ScenarioConfig ParseConfig(std::string_view text,
                           const std::vector<std::pair<std::string, std::string>>& overrides);

ScenarioConfig LoadConfigFile(const std::string& path);

/// Writes every field explicitly; ParseConfig(SerializeConfig(c)) == c for a
/// validated c with resolved optional fields.
std::string SerializeConfig(const ScenarioConfig& cfg);

/// Deterministic per-purpose random streams derived from the run seed.
enum class RngStream : std::uint32_t
{
    Placement = 1,
    Mobility = 2,
    HelloJitter = 3,
    Traffic = 4,
    Fading = 5,
};

std::mt19937_64 MakeRng(std::uint64_t seed, RngStream stream, std::uint32_t index = 0);

std::vector<Position> GenerateInitialPlacement(const ScenarioConfig& cfg, std::mt19937_64& rng);

} // namespace cbrpsim

#endif // CBRPSIM_SCENARIO_CONFIG_H
