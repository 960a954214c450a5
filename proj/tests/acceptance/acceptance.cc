// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "cbrpsim/clustering.h"
#include "cbrpsim/experiment.h"
#include "cbrpsim/radio-channel.h"
#include "cbrpsim/simulator.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef SIMRUN_PATH
#define SIMRUN_PATH "simrun"
#endif

using namespace cbrpsim;

namespace
{

struct Outcome
{
    bool pass = true;
    std::ostringstream note;

    void
    Require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            note << " [" << what << "]";
        }
    }
};

std::uint64_t g_violations = 0;
std::uint64_t g_runs = 0;
std::vector<std::string> g_violationText;

void
Count(const Simulation& sim)
{
    ++g_runs;
    g_violations += sim.Violations().size();
    for (const auto& v : sim.Violations())
    {
        if (g_violationText.size() < 5)
        {
            g_violationText.push_back(v);
        }
    }
}

bool
Close(double got, double want, double rel)
{
    if (want == 0.0)
    {
        return std::abs(got) <= rel;
    }
    return std::abs(got - want) <= rel * std::abs(want);
}

ScenarioConfig
DeskScale()
{
    ScenarioConfig c;
    c.node_count = 25;
    c.area_width = 500;
    c.area_height = 500;
    c.flow_count = 10;
    c.packet_rate = 4;
    c.sim_duration = 300;
    return c;
}

std::unique_ptr<Simulation>
RunOne(const ScenarioConfig& c, SimulationOptions o = {})
{
    auto sim = std::make_unique<Simulation>(c, o);
    sim->Run();
    return sim;
}

/// Runs every config on a small thread pool; results keep input order.
std::vector<RunReport>
RunAll(const std::vector<ScenarioConfig>& configs)
{
    std::vector<RunReport> out(configs.size());
    std::vector<std::size_t> violations(configs.size());
    std::vector<std::string> firstViolation(configs.size());
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
    {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < configs.size(); i = next++)
            {
                Simulation sim(configs[i]);
                sim.Run();
                out[i] = sim.Report();
                violations[i] = sim.Violations().size();
                if (!sim.Violations().empty())
                {
                    firstViolation[i] = sim.Violations().front();
                }
            }
        });
    }
    for (auto& t : pool)
    {
        t.join();
    }
    for (std::size_t i = 0; i < configs.size(); ++i)
    {
        ++g_runs;
        g_violations += violations[i];
        if (!firstViolation[i].empty() && g_violationText.size() < 5)
        {
            g_violationText.push_back(firstViolation[i]);
        }
    }
    return out;
}

double
Mean(const std::vector<RunReport>& runs, Protocol p, double axis, bool bySpeed,
     const std::function<double(const RunReport&)>& f)
{
    double sum = 0;
    int n = 0;
    for (const auto& r : runs)
    {
        const double v = bySpeed ? r.config.max_speed : r.config.packet_rate;
        if (r.protocol == p && v == axis)
        {
            sum += f(r);
            ++n;
        }
    }
    return n ? sum / n : 0.0;
}

std::vector<ScenarioConfig>
SweepConfigs(const std::vector<double>& values, bool bySpeed)
{
    std::vector<ScenarioConfig> out;
    for (double v : values)
    {
        for (Protocol p : {Protocol::Cbrp, Protocol::CrossCbrp})
        {
            for (std::uint64_t seed = 0; seed < 5; ++seed)
            {
                auto c = DeskScale();
                if (bySpeed)
                {
                    c.max_speed = v;
                }
                else
                {
                    c.max_speed = 20;
                    c.packet_rate = v;
                }
                c.protocol = p;
                c.rng_seed = seed;
                out.push_back(c);
            }
        }
    }
    return out;
}

std::string
Slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

void
FormulaOracles(Outcome& o)
{
    o.Require(Close(RelativeMobility(1.0, 1.0), 0.0, 1e-9), "equal powers");
    o.Require(Close(RelativeMobility(100.0, 1.0), 20.0, 1e-9), "x100");
    o.Require(Close(RelativeMobility(0.1, 1.0), -10.0, 1e-9), "x0.1");
    o.Require(Close(RelativeMobility(3.7e-9, 3.7e-7), -20.0, 1e-9), "small powers");
    o.Require(AggregateMobility({}) == 0.0, "empty");
    const std::vector<double> zeros{0, 0, 0};
    o.Require(AggregateMobility(zeros) == 0.0, "zeros");
    const std::vector<double> two{3.0, -4.0};
    o.Require(Close(AggregateMobility(two), 12.5, 1e-9), "{3,-4}");
    for (double n : {2.0, 3.0, 4.0})
    {
        ChannelModel m;
        m.exponent = n;
        for (double x : {1.0, 7.5, 125.0, 400.0})
        {
            const double ratio = ReceivedPower(m, 1.0, x) / ReceivedPower(m, 1.0, 2 * x);
            o.Require(Close(ratio, std::pow(2.0, n), 1e-9), "ratio law n=" + std::to_string(n));
        }
    }
}

void
Determinism(Outcome& o)
{
    const auto base = std::filesystem::temp_directory_path() / "cbrpsim_acceptance_det";
    std::filesystem::remove_all(base);
    std::string rows[2];
    for (int i = 0; i < 2; ++i)
    {
        const auto dir = base / std::to_string(i);
        const std::string cmd = std::string("\"") + SIMRUN_PATH +
                                "\" --protocol both --seed 7 --node_count 25 --area_width 500"
                                " --area_height 500 --out \"" +
                                dir.string() + "\" > /dev/null";
        o.Require(std::system(cmd.c_str()) == 0, "simrun exit status");
        rows[i] = Slurp(dir / "runs.csv");
    }
    o.Require(!rows[0].empty(), "runs.csv written");
    o.Require(rows[0] == rows[1], "runs.csv differs");
    o.note << " bytes=" << rows[0].size();
    auto c = DeskScale();
    c.rng_seed = 7;
    c.protocol = Protocol::CrossCbrp;
    c.sim_duration = 100;
    auto a = RunOne(c);
    auto b = RunOne(c);
    Count(*a);
    Count(*b);
    o.Require(a->RoleChanges() == b->RoleChanges(), "role change sequences differ");
}

void
StaticFixpoint(Outcome& o)
{
    std::size_t equalSets = 0;
    std::uint64_t changes = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        std::map<Protocol, std::set<NodeId>> heads;
        for (Protocol p : {Protocol::Cbrp, Protocol::CrossCbrp})
        {
            auto c = DeskScale();
            c.hold_positions = true;
            c.protocol = p;
            c.rng_seed = seed;
            auto sim = RunOne(c);
            Count(*sim);
            changes += sim->Report().ch_changes;
            for (NodeId id = 0; id < sim->NodeCount(); ++id)
            {
                if (sim->Cluster(id).GetRole() == Role::ClusterHead)
                {
                    heads[p].insert(id);
                }
            }
        }
        if (heads[Protocol::Cbrp] == heads[Protocol::CrossCbrp])
        {
            ++equalSets;
        }
    }
    o.Require(changes == 0, "ch_changes after grace = " + std::to_string(changes));
    o.Require(equalSets == 5, "cluster sets equal in " + std::to_string(equalSets) + "/5");
    o.note << " seeds=5 ch_changes=" << changes;
}

void
SpeedSweep(Outcome& trend, Outcome& delivery)
{
    const std::vector<double> speeds{10, 20, 30};
    const auto runs = RunAll(SweepConfigs(speeds, true));
    auto ch = [](const RunReport& r) { return static_cast<double>(r.ch_changes); };
    auto pdr = [](const RunReport& r) { return r.pdr.value_or(0.0); };
    auto thr = [](const RunReport& r) { return r.throughput_bps; };
    double prevCbrp = -1;
    double prevCross = -1;
    double gainSum = 0;
    for (double v : speeds)
    {
        const double a = Mean(runs, Protocol::Cbrp, v, true, ch);
        const double b = Mean(runs, Protocol::CrossCbrp, v, true, ch);
        trend.note << " v" << v << ":" << a << "/" << b;
        trend.Require(b < a, "cross not below cbrp at speed " + FormatNumber(v));
        trend.Require(a >= prevCbrp, "cbrp decreasing at speed " + FormatNumber(v));
        trend.Require(b >= prevCross, "cross decreasing at speed " + FormatNumber(v));
        prevCbrp = a;
        prevCross = b;
        gainSum += a > 0 ? 100.0 * (a - b) / a : 0.0;

        const double pa = Mean(runs, Protocol::Cbrp, v, true, pdr);
        const double pb = Mean(runs, Protocol::CrossCbrp, v, true, pdr);
        const double ta = Mean(runs, Protocol::Cbrp, v, true, thr);
        const double tb = Mean(runs, Protocol::CrossCbrp, v, true, thr);
        delivery.note << " v" << v << ": pdr " << FormatNumber(pa) << "/" << FormatNumber(pb)
                      << " thr " << FormatNumber(ta) << "/" << FormatNumber(tb);
        delivery.Require(pb >= pa, "pdr at speed " + FormatNumber(v));
        delivery.Require(tb >= ta, "throughput at speed " + FormatNumber(v));
    }
    trend.note << " mean reduction " << FormatNumber(gainSum / speeds.size())
               << "% (reference 37%)";
}

void
RateSweep(Outcome& o)
{
    const std::vector<double> rates{1, 2, 4, 8};
    const auto runs = RunAll(SweepConfigs(rates, false));
    auto ch = [](const RunReport& r) { return static_cast<double>(r.ch_changes); };
    auto pdr = [](const RunReport& r) { return r.pdr.value_or(0.0); };
    std::map<Protocol, double> prevCh{{Protocol::Cbrp, -1}, {Protocol::CrossCbrp, -1}};
    std::map<Protocol, double> prevPdr{{Protocol::Cbrp, 2}, {Protocol::CrossCbrp, 2}};
    for (double r : rates)
    {
        o.note << " r" << r << ":";
        for (Protocol p : {Protocol::Cbrp, Protocol::CrossCbrp})
        {
            const double c = Mean(runs, p, r, false, ch);
            const double d = Mean(runs, p, r, false, pdr);
            o.note << " " << ToString(p) << " ch " << c << " pdr " << FormatNumber(d);
            o.Require(c >= prevCh[p],
                      std::string(ToString(p)) + " ch decreasing at rate " + FormatNumber(r));
            o.Require(d <= prevPdr[p],
                      std::string(ToString(p)) + " pdr increasing at rate " + FormatNumber(r));
            prevCh[p] = c;
            prevPdr[p] = d;
        }
        o.Require(Mean(runs, Protocol::CrossCbrp, r, false, ch) <=
                      Mean(runs, Protocol::Cbrp, r, false, ch),
                  "cross above cbrp at rate " + FormatNumber(r));
    }
}

bool
Connected(const std::vector<Position>& pos, double range)
{
    std::vector<bool> seen(pos.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty())
    {
        const auto i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < pos.size(); ++j)
        {
            if (!seen[j] && Distance(pos[i], pos[j]) <= range)
            {
                seen[j] = true;
                stack.push_back(j);
            }
        }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

void
RoutingOracle(Outcome& o)
{
    std::size_t topologies = 0;
    std::size_t routes = 0;
    std::size_t badRoutes = 0;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t seed = 1000;
    std::mt19937_64 shape(77);
    while (topologies < 50)
    {
        ScenarioConfig c;
        c.node_count = 4 + static_cast<std::uint32_t>(shape() % 12);
        c.area_width = c.area_height = 200.0 + static_cast<double>(shape() % 5) * 100.0;
        c.hold_positions = true;
        c.flow_count = c.node_count / 2;
        c.packet_rate = 4;
        c.traffic_start_time = c.FormationGrace();
        c.sim_duration = c.traffic_start_time + 40;
        c.protocol = topologies % 2 ? Protocol::CrossCbrp : Protocol::Cbrp;
        c.rng_seed = seed++;
        auto rng = MakeRng(c.rng_seed, RngStream::Placement);
        const auto pos = GenerateInitialPlacement(c, rng);
        if (!Connected(pos, c.tx_range))
        {
            continue;
        }
        ++topologies;
        auto sim = RunOne(c);
        Count(*sim);
        if (sim->InitialPositions() != pos)
        {
            o.Require(false, "placement mismatch at seed " + std::to_string(c.rng_seed));
            continue;
        }
        for (const auto& r : sim->InstalledRoutes())
        {
            ++routes;
            bool ok = r.hops.size() >= 2;
            for (std::size_t i = 0; ok && i + 1 < r.hops.size(); ++i)
            {
                ok = Distance(pos[r.hops[i]], pos[r.hops[i + 1]]) <= c.tx_range;
            }
            if (!ok)
            {
                ++badRoutes;
            }
        }
        const auto& l = sim->Ledger();
        // packets still in the pipe at the horizon are not losses
        sent += l.data_sent - l.in_flight_at_horizon;
        delivered += l.data_delivered;
        if (l.DropsTotal() != 0)
        {
            o.Require(false, "drops at seed " + std::to_string(c.rng_seed));
        }
    }
    o.Require(badRoutes == 0, std::to_string(badRoutes) + " invalid routes");
    o.Require(sent > 0 && delivered == sent, "pdr below 1");
    o.note << " topologies=" << topologies << " routes=" << routes << " delivered=" << delivered
           << "/" << sent;
}

void
ScaleInvariance(Outcome& o)
{
    for (Protocol p : {Protocol::Cbrp, Protocol::CrossCbrp})
    {
        auto c = DeskScale();
        c.max_speed = 20;
        c.protocol = p;
        c.rng_seed = 0;
        auto base = RunOne(c);
        c.tx_power *= 1000;
        auto loud = RunOne(c);
        Count(*base);
        Count(*loud);
        o.Require(!base->RoleChanges().empty(), "no role changes to compare");
        o.Require(base->RoleChanges() == loud->RoleChanges(),
                  std::string(ToString(p)) + " role changes differ");
        o.note << " " << ToString(p) << " events=" << base->RoleChanges().size();
    }
}

} // namespace

int
main()
{
    using Clock = std::chrono::steady_clock;
    std::map<int, Outcome> results;
    std::map<int, double> seconds;
    auto timed = [&](std::vector<int> ids, const std::function<void()>& f) {
        const auto t0 = Clock::now();
        try
        {
            f();
        }
        catch (const std::exception& e)
        {
            for (int id : ids)
            {
                results[id].Require(false, std::string("exception: ") + e.what());
            }
        }
        const double s = std::chrono::duration<double>(Clock::now() - t0).count();
        for (int id : ids)
        {
            seconds[id] = s;
        }
    };

    timed({1}, [&] { FormulaOracles(results[1]); });
    timed({2}, [&] { Determinism(results[2]); });
    timed({3}, [&] { StaticFixpoint(results[3]); });
    timed({4, 5}, [&] { SpeedSweep(results[4], results[5]); });
    timed({6}, [&] { RateSweep(results[6]); });
    timed({7}, [&] { RoutingOracle(results[7]); });
    timed({9}, [&] { ScaleInvariance(results[9]); });

    auto& inv = results[8];
    inv.Require(g_violations == 0, std::to_string(g_violations) + " violations");
    for (const auto& v : g_violationText)
    {
        inv.note << " " << v << ";";
    }
    inv.note << " runs=" << g_runs;
    seconds[8] = 0;

    const std::map<int, std::string> names{
        {1, "formula oracles"},
        {2, "determinism"},
        {3, "static fixpoint"},
        {4, "head-change trend over speed"},
        {5, "delivery and throughput over speed"},
        {6, "rate sweep trends"},
        {7, "routing oracle"},
        {8, "structural invariants"},
        {9, "scale invariance"},
    };
    bool all = true;
    for (const auto& [id, name] : names)
    {
        auto& r = results[id];
        all = all && r.pass;
        std::printf("criterion %d %s: %s (%.1f s)%s\n", id, name.c_str(), r.pass ? "PASS" : "FAIL",
                    seconds[id], r.note.str().c_str());
    }
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
