#include "lpep/cli.hpp"
#include "lpep/wire.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lpep::cli {

namespace {

std::string signed_entries(const TimePowerMapping& m) {
    return m.empty() ? "(none)" : m.to_string();
}

}  // namespace

int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err) {
    netsim::Scenario scenario;
    try {
        scenario = load_scenario(flags.scenario);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    netsim::RunOptions options;
    options.zero_delays = flags.no_delays;
    if (flags.solver) {
        options.solver = solver::parse_solver_mode(*flags.solver);
        if (!options.solver) {
            err << "error: --solver: unknown mode '" << *flags.solver << "' (gcd, intervals or auto)\n";
            return 1;
        }
    }
    const std::uint64_t seed = flags.seed.value_or(scenario.run.seed);
    const std::size_t repetitions = flags.repeat.value_or(scenario.run.repetitions);
    if (repetitions == 0) {
        err << "error: --repeat must be at least 1\n";
        return 1;
    }

    std::vector<netsim::SimTrace> traces;
    bool all_exact = true;
    try {
        for (std::size_t k = 0; k < repetitions; ++k) {
            options.repetition = k;
            auto result = netsim::run(scenario, seed + k, options);
            for (const auto& o : result.outcomes) {
                all_exact = all_exact && o.exact && o.withdrawn.empty();
            }
            traces.push_back(std::move(result.trace));
        }
    } catch (const netsim::RunawaySimulation& e) {
        err << "error: " << flags.scenario << ": runaway simulation: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        err << "error: " << flags.scenario << ": " << e.what() << '\n';
        return 1;
    }

    wire::MetricsReport report;
    try {
        report = wire::aggregate(traces);
    } catch (const Error& e) {
        err << "error: " << flags.scenario << ": " << e.what() << '\n';
        return 1;
    }

    if (!flags.trace.empty()) {
        std::ofstream t(flags.trace, std::ios::binary);
        for (const auto& trace : traces) {
            netsim::write_trace(t, trace);
        }
        if (!t) {
            err << "error: --trace: cannot write '" << flags.trace << "'\n";
            return 1;
        }
    }
    const std::string json = wire::to_json(report);
    if (flags.out.empty()) {
        out << json;
    } else {
        std::ofstream o(flags.out, std::ios::binary);
        o << json;
        if (!o) {
            err << "error: --out: cannot write '" << flags.out << "'\n";
            return 1;
        }
        out << report.negotiation_count << " negotiations, matched_ratio " << report.matched_ratio
            << ", mean period " << report.period_s.mean << " s\n";
    }
    if (flags.require_exact && !all_exact) {
        err << "error: at least one negotiation did not reach an exact match\n";
        return 2;
    }
    return 0;
}

TimePowerMapping parse_solve_mapping(std::string_view text, Direction direction, const std::string& what) {
    if (text.empty()) {
        throw Error(what + ": empty mapping");
    }
    // A bare magnitude covers the default window.
    if (text.find_first_not_of("0123456789") == std::string_view::npos) {
        Watts w = 0;
        if (std::from_chars(text.data(), text.data() + text.size(), w).ec != std::errc{}) {
            throw Error(what + ": magnitude out of range");
        }
        try {
            return TimePowerMapping::single(default_window, w, direction);
        } catch (const InvalidMapping& e) {
            throw Error(what + ": " + e.what());
        }
    }
    std::string spaced(text);
    std::size_t column = 1;
    for (std::size_t i = 0; i < spaced.size(); ++i) {
        if (spaced[i] == '+') {
            spaced[i] = ' ';
        }
    }
    try {
        return parse_mapping(spaced, direction);
    } catch (const Error& e) {
        // Locate the first offending entry for the message.
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find('+', start);
            if (end == std::string_view::npos) {
                end = text.size();
            }
            try {
                parse_mapping(text.substr(start, end - start), direction);
            } catch (const Error&) {
                column = start + 1;
                break;
            }
            start = end + 1;
        }
        throw Error(what + " at column " + std::to_string(column) + ": " + e.what());
    }
}

int cmd_solve(const SolveFlags& flags, std::ostream& out, std::ostream& err) {
    const auto mode = solver::parse_solver_mode(flags.mode);
    if (!mode) {
        err << "error: --mode: unknown mode '" << flags.mode << "' (gcd, intervals or auto)\n";
        return 1;
    }
    if (flags.bound == 0 || flags.bound > tvl::max_enumeration_bound) {
        err << "error: --bound: must be in 1.." << tvl::max_enumeration_bound << '\n';
        return 1;
    }
    TimePowerMapping demand;
    std::vector<solver::Reply> replies;
    try {
        demand = parse_solve_mapping(flags.demand, Direction::Demand, "--demand");
        std::size_t start = 0;
        AgentId agent = 1;
        while (start <= flags.offers.size()) {
            auto end = flags.offers.find(',', start);
            if (end == std::string::npos) {
                end = flags.offers.size();
            }
            const std::string what = "--offers (offer " + std::to_string(agent) + ", column " +
                                     std::to_string(start + 1) + ")";
            replies.push_back(solver::Reply{
                agent, parse_solve_mapping(std::string_view(flags.offers).substr(start, end - start),
                                           Direction::Supply, what),
                std::nullopt});
            ++agent;
            start = end + 1;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    solver::Resolution r;
    try {
        r = solver::resolve(demand, replies, *mode, flags.bound);
    } catch (const solver::AtomExplosion& e) {
        out << "mode: gcd\n"
            << "atoms: " << e.atoms << '\n'
            << "variables: " << e.variables << '\n'
            << "status: atom explosion (" << e.variables << " variables exceed bound " << e.bound
            << "; use --mode intervals or auto)\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    out << "mode: " << solver::to_string(r.mode) << '\n'
        << "partition: " << r.partition << '\n'
        << "atoms: " << r.atom_count << '\n'
        << "variables: " << r.variables << '\n'
        << "status: " << (r.solution.exact ? "exact" : "best effort") << '\n'
        << "matched: " << signed_entries(r.solution.matched_mapping(Direction::Supply)) << '\n'
        << "accepted:";
    if (r.solution.accepted.empty()) {
        out << " (none)";
    }
    for (const auto& [agent, mapping] : r.solution.accepted) {
        out << " #" << agent << '=' << mapping.to_string();
    }
    out << '\n';
    return 0;
}

}  // namespace lpep::cli
