#include "cbrpsim/experiment.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace cbrpsim
{

namespace
{

using RunKey = std::tuple<Protocol, std::uint64_t, double, double>;

RunKey
KeyOf(const RunReport& r)
{
    return {r.protocol, r.seed, r.max_speed, r.packet_rate};
}

RunKey
KeyOf(const ScenarioConfig& c)
{
    return {c.protocol, c.rng_seed, c.max_speed, c.packet_rate};
}

std::string
RunTag(const ScenarioConfig& c)
{
    std::ostringstream o;
    o << ToString(c.protocol) << "_s" << c.rng_seed << "_v" << FormatNumber(c.max_speed) << "_r"
      << FormatNumber(c.packet_rate);
    return o.str();
}

void
WriteFile(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    out << text;
}

std::string
WriteBreachTrace(const ScenarioConfig& cfg, const std::filesystem::path& dir)
{
    SimulationOptions opts;
    opts.record_trace = true;
    Simulation sim(cfg, opts);
    sim.Run();
    const auto path = dir / ("breach_trace_" + RunTag(cfg) + ".csv");
    std::ofstream out(path);
    WriteEventTrace(out, sim.Trace());
    return path.string();
}

RunReport
ExecuteRun(const ScenarioConfig& cfg, const SweepOptions& options)
{
    SimulationOptions simOpts;
    if (options.trace)
    {
        simOpts.record_trace = true;
        simOpts.record_route_events = true;
        simOpts.cluster_snapshot_period = 1.0;
    }
    Simulation sim(cfg, simOpts);
    sim.Run();
    if (options.trace)
    {
        const auto tag = RunTag(cfg);
        std::ofstream events(options.out_dir / ("events_" + tag + ".csv"));
        WriteEventTrace(events, sim.Trace());
        std::ofstream routes(options.out_dir / ("routes_" + tag + ".csv"));
        WriteRouteEvents(routes, sim.RouteEvents(), sim.Flows());
        std::ofstream clusters(options.out_dir / ("clusters_" + tag + ".csv"));
        WriteClusterSnapshots(clusters, sim.ClusterSnapshots());
        std::ofstream mobility(options.out_dir / ("mobility_" + tag + ".csv"));
        WriteMobilityTrace(mobility, sim.InitialTracks(), cfg.sim_duration, 1.0);
    }
    if (!sim.Violations().empty())
    {
        const auto path = WriteBreachTrace(cfg, options.out_dir);
        throw InvariantBreach(std::to_string(sim.Violations().size()) +
                                  " invariant violation(s) in run " + RunTag(cfg) +
                                  "; first: " + sim.Violations().front(),
                              path);
    }
    return sim.Report();
}

} // namespace

std::string_view
ToString(SweepAxis axis)
{
    switch (axis)
    {
    case SweepAxis::None:
        return "none";
    case SweepAxis::MaxSpeed:
        return "max_speed";
    case SweepAxis::PacketRate:
        return "packet_rate";
    }
    return "?";
}

std::pair<SweepAxis, std::vector<double>>
ParseSweep(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
    {
        throw ConfigError("sweep must look like speed=10,20,30 or rate=1,2,4,8");
    }
    const auto name = text.substr(0, eq);
    SweepAxis axis;
    if (name == "speed" || name == "max_speed")
    {
        axis = SweepAxis::MaxSpeed;
    }
    else if (name == "rate" || name == "packet_rate")
    {
        axis = SweepAxis::PacketRate;
    }
    else
    {
        throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
    }
    std::vector<double> values;
    std::stringstream ss{std::string(text.substr(eq + 1))};
    std::string item;
    while (std::getline(ss, item, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size())
            {
                throw std::invalid_argument(item);
            }
        }
        catch (const std::exception&)
        {
            throw ConfigError("bad sweep value '" + item + "'");
        }
    }
    if (values.empty())
    {
        throw ConfigError("sweep has no values");
    }
    return {axis, values};
}

double
AxisValue(SweepAxis axis, const ScenarioConfig& cfg)
{
    switch (axis)
    {
    case SweepAxis::MaxSpeed:
        return cfg.max_speed;
    case SweepAxis::PacketRate:
        return cfg.packet_rate;
    case SweepAxis::None:
        break;
    }
    return 0.0;
}

std::vector<ScenarioConfig>
ExpandPlan(const ExperimentPlan& plan)
{
    std::vector<double> values = plan.values;
    if (plan.axis == SweepAxis::None || values.empty())
    {
        values = {AxisValue(plan.axis, plan.base)};
    }
    std::vector<ScenarioConfig> out;
    for (double v : values)
    {
        for (Protocol p : plan.protocols)
        {
            for (std::uint64_t seed : plan.seeds)
            {
                ScenarioConfig c = plan.base;
                if (plan.axis == SweepAxis::MaxSpeed)
                {
                    c.max_speed = v;
                }
                else if (plan.axis == SweepAxis::PacketRate)
                {
                    c.packet_rate = v;
                }
                c.protocol = p;
                c.rng_seed = seed;
                Validate(c);
                out.push_back(c);
            }
        }
    }
    return out;
}

RunReport
RunSingle(const ScenarioConfig& cfg, const SimulationOptions& options)
{
    Simulation sim(cfg, options);
    sim.Run();
    if (!sim.Violations().empty())
    {
        throw InvariantBreach(std::to_string(sim.Violations().size()) +
                              " invariant violation(s); first: " + sim.Violations().front());
    }
    return sim.Report();
}

std::vector<CellSummary>
Summarize(SweepAxis axis, const std::vector<RunReport>& runs)
{
    std::vector<double> order;
    std::map<double, std::vector<RunReport>> groups;
    for (const auto& r : runs)
    {
        const double v = AxisValue(axis, r.config);
        if (!groups.count(v))
        {
            order.push_back(v);
        }
        groups[v].push_back(r);
    }
    std::vector<CellSummary> cells;
    for (double v : order)
    {
        cells.push_back({v, Aggregate(groups[v])});
    }
    return cells;
}

SweepResult
RunSweep(const ExperimentPlan& plan, const SweepOptions& options)
{
    std::filesystem::create_directories(options.out_dir);
    const auto configs = ExpandPlan(plan);
    const auto runsPath = options.out_dir / "runs.csv";

    std::map<RunKey, RunReport> previous;
    if (options.resume && std::filesystem::exists(runsPath))
    {
        for (auto& r : ReadRunsCsv(runsPath))
        {
            previous.emplace(KeyOf(r), std::move(r));
        }
    }

    std::vector<std::optional<RunReport>> results(configs.size());
    std::vector<std::size_t> todo;
    SweepResult result;
    for (std::size_t i = 0; i < configs.size(); ++i)
    {
        if (auto it = previous.find(KeyOf(configs[i])); it != previous.end())
        {
            results[i] = it->second;
            results[i]->config = configs[i];
            ++result.reused;
        }
        else
        {
            todo.push_back(i);
        }
    }

    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < todo.size(); k = next++)
        {
            const auto i = todo[k];
            try
            {
                results[i] = ExecuteRun(configs[i], options);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs,
                                                          static_cast<unsigned>(todo.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j)
    {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool)
    {
        t.join();
    }
    result.executed = todo.size();

    for (const auto& r : results)
    {
        if (r)
        {
            result.runs.push_back(*r);
        }
    }
    {
        std::ostringstream runs;
        WriteRunsCsv(runs, result.runs);
        WriteFile(runsPath, runs.str());
    }
    for (const auto& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }

    result.cells = Summarize(plan.axis, result.runs);
    std::ostringstream summary;
    WriteSummaryCsv(summary, plan.axis, result.cells);
    WriteFile(options.out_dir / "summary.csv", summary.str());
    std::ostringstream report;
    WriteReportText(report, plan, result.cells);
    WriteFile(options.out_dir / "report.txt", report.str());
    return result;
}

void
WriteRunsCsv(std::ostream& out, const std::vector<RunReport>& runs)
{
    out << RunReportCsvHeader() << '\n';
    for (const auto& r : runs)
    {
        out << ToCsvRow(r) << '\n';
    }
}

std::vector<RunReport>
ReadRunsCsv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw std::runtime_error("cannot read '" + path.string() + "'");
    }
    std::vector<RunReport> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line))
    {
        if (header)
        {
            header = false;
            continue;
        }
        if (!line.empty())
        {
            out.push_back(ParseRunReportRow(line));
        }
    }
    return out;
}

void
WriteSummaryCsv(std::ostream& out, SweepAxis axis, const std::vector<CellSummary>& cells)
{
    out << "axis,axis_value,protocol,metric,mean,stddev,n\n";
    for (const auto& cell : cells)
    {
        for (const auto& [protocol, metrics] : cell.summary.by_protocol)
        {
            for (const auto& name : SummaryMetricNames())
            {
                const auto& s = metrics.at(name);
                out << ToString(axis) << ',' << FormatNumber(cell.axis_value) << ','
                    << ToString(protocol) << ',' << name << ',' << FormatNumber(s.mean) << ','
                    << (s.stddev ? FormatNumber(*s.stddev) : "NA") << ',' << s.n << '\n';
            }
        }
    }
}

void
WriteReportText(std::ostream& out, const ExperimentPlan& plan,
                const std::vector<CellSummary>& cells)
{
    char buf[256];
    out << "cbrpsim experiment report\n";
    out << "sweep axis: " << ToString(plan.axis) << "\n";
    out << "seeds:";
    for (auto s : plan.seeds)
    {
        out << ' ' << s;
    }
    out << "\n\n";
    const auto& c = plan.base;
    std::snprintf(buf, sizeof(buf),
                  "nodes %u, area %gx%g m, tx_range %g m, duration %g s, flows %u at %g pkt/s, "
                  "%u-byte packets\n",
                  c.node_count, c.area_width, c.area_height, c.tx_range, c.sim_duration,
                  c.FlowCount(), c.packet_rate, c.packet_size);
    out << buf;
    if (!c.allow_shared_endpoints)
    {
        out << "flow endpoints are pairwise disjoint (at most node_count/2 flows); 60 disjoint "
               "flows would need 120 nodes\n";
    }
    out << "packet_rate is read as packets per second\n\n";

    for (const auto& name : SummaryMetricNames())
    {
        out << "== " << name << " ==\n";
        std::snprintf(buf, sizeof(buf), "%-12s %-28s %-28s %10s\n", "axis", "cbrp mean (sd)",
                      "cross-cbrp mean (sd)", "change %");
        out << buf;
        for (const auto& cell : cells)
        {
            auto fmt = [&](Protocol p) -> std::string {
                auto it = cell.summary.by_protocol.find(p);
                if (it == cell.summary.by_protocol.end())
                {
                    return "-";
                }
                const auto& s = it->second.at(name);
                char b[64];
                if (s.stddev)
                {
                    std::snprintf(b, sizeof(b), "%.6g (%.3g)", s.mean, *s.stddev);
                }
                else
                {
                    std::snprintf(b, sizeof(b), "%.6g (n/a)", s.mean);
                }
                return b;
            };
            std::string change = "-";
            if (auto it = cell.summary.mean_change_pct.find(name);
                it != cell.summary.mean_change_pct.end())
            {
                char b[32];
                std::snprintf(b, sizeof(b), "%+.2f", it->second);
                change = b;
            }
            std::snprintf(buf, sizeof(buf), "%-12g %-28s %-28s %10s\n", cell.axis_value,
                          fmt(Protocol::Cbrp).c_str(), fmt(Protocol::CrossCbrp).c_str(),
                          change.c_str());
            out << buf;
        }
        out << '\n';
    }

    bool anyPaired = false;
    for (const auto& cell : cells)
    {
        anyPaired = anyPaired || !cell.summary.paired.empty();
    }
    if (anyPaired)
    {
        out << "== paired deltas (cross-cbrp - cbrp, shared seeds) ==\n";
        for (const auto& cell : cells)
        {
            for (const auto& row : cell.summary.paired)
            {
                std::snprintf(buf, sizeof(buf), "axis %g seed %llu:", cell.axis_value,
                              static_cast<unsigned long long>(row.seed));
                out << buf;
                for (const auto& name : SummaryMetricNames())
                {
                    if (auto it = row.delta.find(name); it != row.delta.end())
                    {
                        std::snprintf(buf, sizeof(buf), " %s=%+.6g", name.c_str(), it->second);
                        out << buf;
                    }
                }
                out << '\n';
            }
        }
        out << '\n';
        out << "reference published improvements (different MAC/PHY, not reproducible at this "
               "scale): cluster-head changes -37%, PDR +9%, throughput +8.5%\n";
    }

    if (!plan.seeds.empty())
    {
        ScenarioConfig first = plan.base;
        first.rng_seed = plan.seeds.front();
        auto rng = MakeRng(first.rng_seed, RngStream::Traffic);
        out << "\n== flow table (seed " << first.rng_seed << ") ==\n";
        WriteFlowTable(out, GenerateFlows(first, rng));
    }
}

} // namespace cbrpsim
