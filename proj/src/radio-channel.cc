#include "cbrpsim/radio-channel.h"

#include <cmath>
#include <string>

namespace cbrpsim
{

ChannelModel
ChannelModel::FromConfig(const ScenarioConfig& cfg)
{
    ChannelModel m;
    m.d0 = cfg.reference_distance_d0;
    m.close_in_gain = cfg.close_in_gain_L_d0;
    m.exponent = cfg.path_loss_exponent_n;
    m.fading_enabled = cfg.fading_enabled;
    Validate(m);
    return m;
}

void
Validate(const ChannelModel& m)
{
    if (!(m.exponent >= 2.0 && m.exponent <= 6.0))
    {
        throw ChannelError("path-loss exponent must satisfy 2 <= n <= 6");
    }
    if (!(m.d0 > 0.0))
    {
        throw ChannelError("reference distance d0 must be positive");
    }
    if (!(m.close_in_gain > 0.0 && m.close_in_gain <= 1.0))
    {
        throw ChannelError("close-in gain must satisfy 0 < L(d0) <= 1");
    }
}

double
ChannelGain(const ChannelModel& m, double x, std::mt19937_64* rng)
{
    if (!(x >= m.d0))
    {
        throw ChannelError("distance " + std::to_string(x) + " m is below d0 = " +
                           std::to_string(m.d0) + " m");
    }
    double xi = 1.0;
    if (m.fading_enabled)
    {
        if (rng == nullptr)
        {
            throw ChannelError("fading enabled but no random stream supplied");
        }
        std::exponential_distribution<double> fade(1.0);
        xi = fade(*rng);
    }
    return m.close_in_gain * std::pow(x / m.d0, -m.exponent) * xi;
}

double
ReceivedPower(const ChannelModel& m, double pt, double x, std::mt19937_64* rng)
{
    if (!(pt > 0.0))
    {
        throw ChannelError("transmit power must be positive");
    }
    return pt * ChannelGain(m, x, rng);
}

} // namespace cbrpsim
