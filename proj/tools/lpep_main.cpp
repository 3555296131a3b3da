#include "lpep/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Power exchange negotiation simulator"};
    app.require_subcommand(1);

    lpep::cli::RunFlags run;
    std::uint64_t seed = 0;
    std::size_t repeat = 0;
    std::string solver;
    auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write a metrics report");
    run_cmd->add_option("--scenario", run.scenario, "Scenario file")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Base seed; repetition k uses seed + k");
    auto* repeat_opt = run_cmd->add_option("--repeat", repeat, "Number of repetitions");
    run_cmd->add_option("--out", run.out, "Report file (stdout when omitted)");
    run_cmd->add_flag("--no-delays", run.no_delays, "Zero every ICT delay");
    auto* solver_opt = run_cmd->add_option("--solver", solver, "gcd, intervals or auto");
    run_cmd->add_option("--trace", run.trace, "Trace file, one JSON record per line");
    run_cmd->add_flag("--require-exact", run.require_exact, "Exit 2 unless every negotiation matched exactly");

    lpep::cli::SolveFlags solve;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one cover problem offline");
    solve_cmd->add_option("--demand", solve.demand, "Demand: watts, or entries like 0-900:10+900-1800:4")
        ->required();
    solve_cmd->add_option("--offers", solve.offers, "Comma-separated offers, same syntax as --demand")
        ->required();
    solve_cmd->add_option("--mode", solve.mode, "gcd, intervals or auto");
    solve_cmd->add_option("--bound", solve.bound, "Largest variable count to enumerate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*run_cmd) {
        if (*seed_opt) {
            run.seed = seed;
        }
        if (*repeat_opt) {
            run.repeat = repeat;
        }
        if (*solver_opt) {
            run.solver = solver;
        }
        return lpep::cli::cmd_run(run, std::cout, std::cerr);
    }
    return lpep::cli::cmd_solve(solve, std::cout, std::cerr);
}
