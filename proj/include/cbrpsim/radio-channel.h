// Log-distance path loss with optional Rayleigh power fading.
//
// Connectivity is the deterministic tx_range disc; received power feeds only
// the mobility metric. Antenna gains and wavelength are folded into the
// close-in gain L(d0).

#ifndef CBRPSIM_RADIO_CHANNEL_H
#define CBRPSIM_RADIO_CHANNEL_H

#include "cbrpsim/scenario-config.h"
#include "cbrpsim/types.h"

#include <random>
#include <stdexcept>

namespace cbrpsim
{

class ChannelError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

struct ChannelModel
{
    double d0 = 1.0;
    double close_in_gain = 1.0;
    double exponent = 2.0;
    bool fading_enabled = false;

    static ChannelModel FromConfig(const ScenarioConfig& cfg);
};

/// Throws ChannelError when the model parameters are outside their valid ranges.
void Validate(const ChannelModel& model);

/// L(d0) * (x / d0)^-n * xi, with xi = 1 unless fading is enabled (then a
/// unit-mean exponential draw from `rng`). Throws ChannelError for x < d0.
double ChannelGain(const ChannelModel& model, double x, std::mt19937_64* rng = nullptr);

/// pt * ChannelGain(x). Throws ChannelError for pt <= 0 or x < d0.
double ReceivedPower(const ChannelModel& model, double pt, double x,
                     std::mt19937_64* rng = nullptr);

/// Closed boundary: distance exactly tx_range is in range.
inline bool
InRange(const Position& a, const Position& b, double txRange)
{
    return Distance(a, b) <= txRange;
}

} // namespace cbrpsim

#endif // CBRPSIM_RADIO_CHANNEL_H
