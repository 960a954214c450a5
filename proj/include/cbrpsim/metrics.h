// Run ledger, per-run report and cross-replication summaries.

#ifndef CBRPSIM_METRICS_H
#define CBRPSIM_METRICS_H

#include "cbrpsim/routing.h"
#include "cbrpsim/scenario-config.h"
#include "cbrpsim/types.h"

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbrpsim
{

struct MetricsLedger
{
    Time formation_grace = 0.0;

    std::uint64_t ch_changes = 0;
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t control_packets_sent = 0;
    std::uint64_t hello_sent = 0;
    std::uint64_t rreq_sent = 0;
    std::uint64_t rrep_sent = 0;
    std::vector<double> latencies;

    std::uint64_t drops_queue = 0;
    std::uint64_t drops_no_route = 0;
    std::uint64_t drops_forwarding = 0;
    std::uint64_t control_dropped = 0;
    std::uint64_t in_flight_at_horizon = 0;
    std::uint64_t invariant_violations = 0;

    /// Counts a cluster-head change when exactly one side of the transition
    /// is the head role and `now` is past the formation grace.
    void RecordRoleChange(NodeId node, Role oldRole, Role newRole, Time now);
    void RecordDelivery(std::uint32_t bytes, double latency);
    void RecordDrop(DropCause cause);
    void RecordControlSent(PacketKind kind);

    std::uint64_t DropsTotal() const { return drops_queue + drops_no_route + drops_forwarding; }
};

struct RunReport
{
    Protocol protocol = Protocol::Cbrp;
    std::uint64_t seed = 0;
    double max_speed = 0.0;
    double packet_rate = 0.0;
    std::uint64_t ch_changes = 0;
    double ch_changes_per_s = 0.0;
    /// Unset when no data was sent.
    std::optional<double> pdr;
    double throughput_bps = 0.0;
    double throughput_pps = 0.0;
    std::uint64_t overhead_pkts = 0;
    std::optional<double> mean_delay_s;
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t drops_queue = 0;
    std::uint64_t drops_no_route = 0;
    std::uint64_t drops_forwarding = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t control_dropped = 0;
    std::uint64_t invariant_violations = 0;

    ScenarioConfig config;
};

RunReport Finalize(const MetricsLedger& ledger, const ScenarioConfig& cfg);

/// Metric names carried into summaries, in report order.
const std::vector<std::string>& SummaryMetricNames();

/// Value of a named summary metric, unset when undefined for this run.
std::optional<double> MetricValue(const RunReport& report, const std::string& name);

class AggregateError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

struct MetricStat
{
    double mean = 0.0;
    /// Sample standard deviation, unset for fewer than two values.
    std::optional<double> stddev;
    std::size_t n = 0;
};

struct PairedRow
{
    std::uint64_t seed = 0;
    /// Cross-CBRP minus CBRP per metric.
    std::map<std::string, double> delta;
};

struct SummaryReport
{
    std::map<Protocol, std::map<std::string, MetricStat>> by_protocol;
    std::vector<PairedRow> paired;
    std::map<std::string, double> mean_delta;
    /// 100 * (mean Cross-CBRP - mean CBRP) / mean CBRP, where the base is non-zero.
    std::map<std::string, double> mean_change_pct;
};

/// Requires at least one report; configs must match except for seed and
/// protocol. Seeds run under both protocols produce paired rows.
SummaryReport Aggregate(std::span<const RunReport> reports);

std::string RunReportCsvHeader();
std::string ToCsvRow(const RunReport& report);

/// Parses one row written by ToCsvRow. The config field is left default.
RunReport ParseRunReportRow(const std::string& line);

std::string FormatNumber(double v);

} // namespace cbrpsim

#endif // CBRPSIM_METRICS_H
