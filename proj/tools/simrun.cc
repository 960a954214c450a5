// simrun: run single simulations or parameter sweeps and write CSV reports.

#include "cbrpsim/experiment.h"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace cbrpsim;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;

/// Turns leftover "--key value" / "--key=value" arguments into config overrides.
std::vector<std::pair<std::string, std::string>>
CollectOverrides(const std::vector<std::string>& extras)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < extras.size(); ++i)
    {
        const auto& arg = extras[i];
        if (arg.rfind("--", 0) != 0)
        {
            throw ConfigError("unexpected argument '" + arg + "'");
        }
        auto body = arg.substr(2);
        if (auto eq = body.find('='); eq != std::string::npos)
        {
            out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (i + 1 >= extras.size())
        {
            throw ConfigError("option '" + arg + "' needs a value");
        }
        out.emplace_back(body, extras[++i]);
    }
    return out;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Cluster-based MANET routing simulator (CBRP / Cross-CBRP)"};
    std::string configPath;
    std::string protocol;
    std::string sweep;
    std::optional<std::uint32_t> seeds;
    std::optional<std::uint64_t> seed;
    std::string outDir = ".";
    bool trace = false;
    bool resume = false;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    app.add_option("--config", configPath, "key=value scenario file");
    app.add_option("--protocol", protocol, "cbrp | cross-cbrp | both")
        ->check(CLI::IsMember({"cbrp", "cross-cbrp", "both"}));
    app.add_option("--sweep", sweep, "speed=v1,v2,... or rate=r1,r2,...");
    auto* seedsOpt = app.add_option("--seeds", seeds, "run seeds 0..N-1");
    app.add_option("--seed", seed, "run a single seed")->excludes(seedsOpt);
    app.add_option("--out", outDir, "output directory for runs.csv, summary.csv, report.txt");
    app.add_flag("--trace", trace, "export event, route, cluster and mobility traces per run");
    app.add_flag("--resume", resume, "skip runs already present in OUT/runs.csv");
    app.add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);
    app.allow_extras();
    app.footer("Any scenario key may be given as --key value; CLI values beat the config file.");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }

    ExperimentPlan plan;
    try
    {
        std::string text;
        if (!configPath.empty())
        {
            std::ifstream in(configPath);
            if (!in)
            {
                throw ConfigError("cannot open config file '" + configPath + "'");
            }
            std::stringstream ss;
            ss << in.rdbuf();
            text = ss.str();
        }
        plan.base = ParseConfig(text, CollectOverrides(app.remaining()));

        if (protocol.empty())
        {
            plan.protocols = {plan.base.protocol};
        }
        else if (protocol == "both")
        {
            plan.protocols = {Protocol::Cbrp, Protocol::CrossCbrp};
        }
        else
        {
            plan.protocols = {ParseProtocol(protocol)};
        }

        if (seed)
        {
            plan.seeds = {*seed};
        }
        else if (seeds)
        {
            for (std::uint32_t s = 0; s < *seeds; ++s)
            {
                plan.seeds.push_back(s);
            }
        }
        else
        {
            for (std::uint32_t r = 0; r < plan.base.replications; ++r)
            {
                plan.seeds.push_back(plan.base.rng_seed + r);
            }
        }

        if (!sweep.empty())
        {
            std::tie(plan.axis, plan.values) = ParseSweep(sweep);
        }
        ExpandPlan(plan);
    }
    catch (const ConfigError& e)
    {
        std::cerr << "simrun: configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    SweepOptions options;
    options.out_dir = outDir;
    options.resume = resume;
    options.trace = trace;
    options.jobs = jobs;
    try
    {
        const auto result = RunSweep(plan, options);
        std::cout << RunReportCsvHeader() << '\n';
        for (const auto& r : result.runs)
        {
            std::cout << ToCsvRow(r) << '\n';
        }
        std::cerr << "simrun: " << result.executed << " run(s) executed, " << result.reused
                  << " reused; reports in " << outDir << '\n';
    }
    catch (const InvariantBreach& e)
    {
        std::cerr << "simrun: internal invariant breach: " << e.what() << '\n';
        if (!e.TracePath().empty())
        {
            std::cerr << "simrun: event trace written to " << e.TracePath() << '\n';
        }
        return kExitInvariant;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "simrun: configuration error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "simrun: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
