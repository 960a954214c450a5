#include "cbrpsim/scenario-config.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace cbrpsim
{

namespace
{

std::string_view
Trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double
ToDouble(std::string_view key, std::string_view value)
{
    double out = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end || !std::isfinite(out))
    {
        throw ConfigError("key '" + std::string(key) + "': expected a number, got '" +
                          std::string(value) + "'");
    }
    return out;
}

template <typename Int>
Int
ToInt(std::string_view key, std::string_view value)
{
    Int out = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
    {
        throw ConfigError("key '" + std::string(key) + "': expected a non-negative integer, got '" +
                          std::string(value) + "'");
    }
    return out;
}

bool
ToBool(std::string_view key, std::string_view value)
{
    if (value == "true" || value == "1" || value == "yes")
    {
        return true;
    }
    if (value == "false" || value == "0" || value == "no")
    {
        return false;
    }
    throw ConfigError("key '" + std::string(key) + "': expected true/false, got '" +
                      std::string(value) + "'");
}

std::string
Num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>&
Setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"node_count",
         [](auto& c, auto k, auto v) { c.node_count = ToInt<std::uint32_t>(k, v); }},
        {"area_width", [](auto& c, auto k, auto v) { c.area_width = ToDouble(k, v); }},
        {"area_height", [](auto& c, auto k, auto v) { c.area_height = ToDouble(k, v); }},
        {"area",
         [](auto& c, auto k, auto v) {
             const auto x = v.find('x');
             if (x == std::string_view::npos)
             {
                 throw ConfigError("key 'area': expected WxH, got '" + std::string(v) + "'");
             }
             c.area_width = ToDouble(k, Trim(v.substr(0, x)));
             c.area_height = ToDouble(k, Trim(v.substr(x + 1)));
         }},
        {"max_speed", [](auto& c, auto k, auto v) { c.max_speed = ToDouble(k, v); }},
        {"min_speed", [](auto& c, auto k, auto v) { c.min_speed = ToDouble(k, v); }},
        {"pause_time", [](auto& c, auto k, auto v) { c.pause_time = ToDouble(k, v); }},
        {"tx_range", [](auto& c, auto k, auto v) { c.tx_range = ToDouble(k, v); }},
        {"sim_duration", [](auto& c, auto k, auto v) { c.sim_duration = ToDouble(k, v); }},
        {"protocol",
         [](auto& c, auto, auto v) {
             try
             {
                 c.protocol = ParseProtocol(v);
             }
             catch (const std::invalid_argument& e)
             {
                 throw ConfigError(std::string("key 'protocol': ") + e.what());
             }
         }},
        {"hello_interval_BI",
         [](auto& c, auto k, auto v) { c.hello_interval_BI = ToDouble(k, v); }},
        {"neighbor_timeout_TP",
         [](auto& c, auto k, auto v) { c.neighbor_timeout_TP = ToDouble(k, v); }},
        {"flow_count",
         [](auto& c, auto k, auto v) { c.flow_count = ToInt<std::uint32_t>(k, v); }},
        {"packet_rate", [](auto& c, auto k, auto v) { c.packet_rate = ToDouble(k, v); }},
        {"packet_size",
         [](auto& c, auto k, auto v) { c.packet_size = ToInt<std::uint32_t>(k, v); }},
        {"queue_capacity",
         [](auto& c, auto k, auto v) { c.queue_capacity = ToInt<std::uint32_t>(k, v); }},
        {"link_rate", [](auto& c, auto k, auto v) { c.link_rate = ToDouble(k, v); }},
        {"path_loss_exponent_n",
         [](auto& c, auto k, auto v) { c.path_loss_exponent_n = ToDouble(k, v); }},
        {"tx_power", [](auto& c, auto k, auto v) { c.tx_power = ToDouble(k, v); }},
        {"reference_distance_d0",
         [](auto& c, auto k, auto v) { c.reference_distance_d0 = ToDouble(k, v); }},
        {"close_in_gain_L_d0",
         [](auto& c, auto k, auto v) { c.close_in_gain_L_d0 = ToDouble(k, v); }},
        {"fading_enabled", [](auto& c, auto k, auto v) { c.fading_enabled = ToBool(k, v); }},
        {"rng_seed", [](auto& c, auto k, auto v) { c.rng_seed = ToInt<std::uint64_t>(k, v); }},
        {"replications",
         [](auto& c, auto k, auto v) { c.replications = ToInt<std::uint32_t>(k, v); }},
        {"allow_shared_endpoints",
         [](auto& c, auto k, auto v) { c.allow_shared_endpoints = ToBool(k, v); }},
        {"hold_positions", [](auto& c, auto k, auto v) { c.hold_positions = ToBool(k, v); }},
        {"traffic_start_time",
         [](auto& c, auto k, auto v) { c.traffic_start_time = ToDouble(k, v); }},
        {"rreq_timeout", [](auto& c, auto k, auto v) { c.rreq_timeout = ToDouble(k, v); }},
        {"max_retries",
         [](auto& c, auto k, auto v) { c.max_retries = ToInt<std::uint32_t>(k, v); }},
        {"pending_capacity",
         [](auto& c, auto k, auto v) { c.pending_capacity = ToInt<std::uint32_t>(k, v); }},
        {"formation_grace",
         [](auto& c, auto k, auto v) { c.formation_grace = ToDouble(k, v); }},
    };
    return table;
}

void
Require(bool ok, const char* constraint)
{
    if (!ok)
    {
        throw ConfigError(std::string("constraint violated: ") + constraint);
    }
}

} // namespace

std::uint32_t
ScenarioConfig::FlowCount() const
{
    return flow_count.value_or(std::min<std::uint32_t>(50, node_count / 2));
}

Time
ScenarioConfig::FormationGrace() const
{
    return formation_grace.value_or(2.0 * hello_interval_BI + neighbor_timeout_TP);
}

void
Validate(const ScenarioConfig& c)
{
    Require(c.node_count >= 2, "node_count >= 2");
    Require(c.area_width > 0 && c.area_height > 0, "area_width > 0 and area_height > 0");
    Require(c.min_speed > 0, "0 < min_speed");
    Require(c.min_speed <= c.max_speed, "min_speed <= max_speed");
    Require(c.pause_time >= 0, "pause_time >= 0");
    Require(c.tx_range > 0, "tx_range > 0");
    Require(c.sim_duration > 0, "sim_duration > 0");
    Require(c.hello_interval_BI > 0, "hello_interval_BI > 0");
    Require(c.neighbor_timeout_TP > 0, "neighbor_timeout_TP > 0");
    Require(c.FlowCount() >= 1, "flow_count >= 1");
    if (!c.allow_shared_endpoints)
    {
        Require(2 * std::uint64_t{c.FlowCount()} <= c.node_count,
                "flow_count <= node_count / 2 (disjoint endpoints; set "
                "allow_shared_endpoints=true to relax)");
    }
    Require(c.packet_rate > 0, "packet_rate > 0");
    Require(c.packet_size > 0, "packet_size > 0");
    Require(c.queue_capacity >= 1, "queue_capacity >= 1");
    Require(c.link_rate > 0, "link_rate > 0");
    Require(c.path_loss_exponent_n >= 2 && c.path_loss_exponent_n <= 6,
            "2 <= path_loss_exponent_n <= 6");
    Require(c.tx_power > 0, "tx_power > 0");
    Require(c.reference_distance_d0 > 0, "reference_distance_d0 > 0");
    Require(c.close_in_gain_L_d0 > 0 && c.close_in_gain_L_d0 <= 1, "0 < close_in_gain_L_d0 <= 1");
    Require(c.replications >= 1, "replications >= 1");
    Require(c.traffic_start_time >= 0, "traffic_start_time >= 0");
    Require(c.rreq_timeout > 0, "rreq_timeout > 0");
    Require(c.pending_capacity >= 1, "pending_capacity >= 1");
    Require(c.FormationGrace() >= 0, "formation_grace >= 0");
}

void
ApplyKey(ScenarioConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = Setters();
    auto it = table.find(key);
    if (it == table.end())
    {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
    it->second(cfg, key, value);
}

ScenarioConfig
ParseConfig(std::string_view text)
{
    return ParseConfig(text, {});
}

ScenarioConfig
ParseConfig(std::string_view text,
            const std::vector<std::pair<std::string, std::string>>& overrides)
{
    ScenarioConfig cfg;
    std::size_t lineNo = 0;
    while (!text.empty())
    {
        ++lineNo;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        line = Trim(line);
        if (line.empty())
        {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": expected key=value, got '" +
                              std::string(line) + "'");
        }
        const auto key = Trim(line.substr(0, eq));
        const auto value = Trim(line.substr(eq + 1));
        if (key.empty())
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": empty key");
        }
        try
        {
            ApplyKey(cfg, key, value);
        }
        catch (const ConfigError& e)
        {
            throw ConfigError("line " + std::to_string(lineNo) + ": " + e.what());
        }
    }
    for (const auto& [k, v] : overrides)
    {
        ApplyKey(cfg, k, v);
    }
    Validate(cfg);
    return cfg;
}

ScenarioConfig
LoadConfigFile(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ParseConfig(ss.str());
}

std::string
SerializeConfig(const ScenarioConfig& c)
{
    std::ostringstream out;
    auto b = [](bool v) { return v ? "true" : "false"; };
    out << "node_count=" << c.node_count << '\n'
        << "area_width=" << Num(c.area_width) << '\n'
        << "area_height=" << Num(c.area_height) << '\n'
        << "max_speed=" << Num(c.max_speed) << '\n'
        << "min_speed=" << Num(c.min_speed) << '\n'
        << "pause_time=" << Num(c.pause_time) << '\n'
        << "tx_range=" << Num(c.tx_range) << '\n'
        << "sim_duration=" << Num(c.sim_duration) << '\n'
        << "protocol=" << ToString(c.protocol) << '\n'
        << "hello_interval_BI=" << Num(c.hello_interval_BI) << '\n'
        << "neighbor_timeout_TP=" << Num(c.neighbor_timeout_TP) << '\n';
    if (c.flow_count)
    {
        out << "flow_count=" << *c.flow_count << '\n';
    }
    out << "packet_rate=" << Num(c.packet_rate) << '\n'
        << "packet_size=" << c.packet_size << '\n'
        << "queue_capacity=" << c.queue_capacity << '\n'
        << "link_rate=" << Num(c.link_rate) << '\n'
        << "path_loss_exponent_n=" << Num(c.path_loss_exponent_n) << '\n'
        << "tx_power=" << Num(c.tx_power) << '\n'
        << "reference_distance_d0=" << Num(c.reference_distance_d0) << '\n'
        << "close_in_gain_L_d0=" << Num(c.close_in_gain_L_d0) << '\n'
        << "fading_enabled=" << b(c.fading_enabled) << '\n'
        << "rng_seed=" << c.rng_seed << '\n'
        << "replications=" << c.replications << '\n'
        << "allow_shared_endpoints=" << b(c.allow_shared_endpoints) << '\n'
        << "hold_positions=" << b(c.hold_positions) << '\n'
        << "traffic_start_time=" << Num(c.traffic_start_time) << '\n'
        << "rreq_timeout=" << Num(c.rreq_timeout) << '\n'
        << "max_retries=" << c.max_retries << '\n'
        << "pending_capacity=" << c.pending_capacity << '\n';
    if (c.formation_grace)
    {
        out << "formation_grace=" << Num(*c.formation_grace) << '\n';
    }
    return out.str();
}

std::mt19937_64
MakeRng(std::uint64_t seed, RngStream stream, std::uint32_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), index};
    return std::mt19937_64(seq);
}

std::vector<Position>
GenerateInitialPlacement(const ScenarioConfig& cfg, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ux(0.0, cfg.area_width);
    std::uniform_real_distribution<double> uy(0.0, cfg.area_height);
    std::vector<Position> out;
    out.reserve(cfg.node_count);
    for (std::uint32_t i = 0; i < cfg.node_count; ++i)
    {
        const double x = ux(rng);
        const double y = uy(rng);
        out.push_back({x, y});
    }
    return out;
}

} // namespace cbrpsim
