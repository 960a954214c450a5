// Experiment orchestration: single runs, parameter sweeps and report files.

#ifndef CBRPSIM_EXPERIMENT_H
#define CBRPSIM_EXPERIMENT_H

#include "cbrpsim/metrics.h"
#include "cbrpsim/scenario-config.h"
#include "cbrpsim/simulator.h"

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cbrpsim
{

enum class SweepAxis : std::uint8_t
{
    None,
    MaxSpeed,
    PacketRate,
};

std::string_view ToString(SweepAxis axis);

/// Raised when a run finishes with invariant violations.
class InvariantBreach : public std::runtime_error
{
  public:
    InvariantBreach(const std::string& what, std::string tracePath = {})
        : std::runtime_error(what),
          m_tracePath(std::move(tracePath))
    {
    }

    const std::string& TracePath() const { return m_tracePath; }

  private:
    std::string m_tracePath;
};

struct ExperimentPlan
{
    ScenarioConfig base;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> values;
    std::vector<Protocol> protocols;
    std::vector<std::uint64_t> seeds;
};

/// Parses "speed=10,20,30" or "rate=1,2,4,8".
std::pair<SweepAxis, std::vector<double>> ParseSweep(std::string_view text);

/// The run set in plan order: axis values, then protocols, then seeds. For
/// SweepAxis::None the single axis value is the base config's own.
std::vector<ScenarioConfig> ExpandPlan(const ExperimentPlan& plan);

double AxisValue(SweepAxis axis, const ScenarioConfig& cfg);

/// Runs one simulation to its horizon. Throws InvariantBreach if any
/// structural invariant was violated.
RunReport RunSingle(const ScenarioConfig& cfg, const SimulationOptions& options = {});

struct SweepOptions
{
    std::filesystem::path out_dir = ".";
    bool resume = false;
    /// Exports per-run event, route, cluster and mobility traces.
    bool trace = false;
    unsigned jobs = 1;
};

struct CellSummary
{
    double axis_value = 0.0;
    SummaryReport summary;
};

struct SweepResult
{
    std::vector<RunReport> runs;
    std::vector<CellSummary> cells;
    std::size_t executed = 0;
    std::size_t reused = 0;
};

/// Summaries per axis value, grouped in order of first appearance.
std::vector<CellSummary> Summarize(SweepAxis axis, const std::vector<RunReport>& runs);

/// Executes the plan and writes runs.csv, summary.csv and report.txt into
/// options.out_dir. On the first failure the completed rows are still
/// written before the exception propagates.
SweepResult RunSweep(const ExperimentPlan& plan, const SweepOptions& options);

void WriteRunsCsv(std::ostream& out, const std::vector<RunReport>& runs);
std::vector<RunReport> ReadRunsCsv(const std::filesystem::path& path);
void WriteSummaryCsv(std::ostream& out, SweepAxis axis, const std::vector<CellSummary>& cells);
void WriteReportText(std::ostream& out, const ExperimentPlan& plan,
                     const std::vector<CellSummary>& cells);

} // namespace cbrpsim

#endif // CBRPSIM_EXPERIMENT_H
