// Scenario files and the two batch commands: `run` (simulate and report) and
// `solve` (one offline cover problem).
//
// Scenario format: INI-like sections, `key = value` lines, `#` comments.
// See scenarios/six_agents.scenario for a commented example.

#pragma once

#include "lpep/netsim.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace lpep::cli {

/// Error carrying its source location, formatted "file:line: message".
class ScenarioError : public netsim::ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Decimal seconds ("0.02", "3", "1.5e-2" not accepted) to microseconds, exactly.
Micros parse_seconds(std::string_view text);

/// Whitespace-separated entries "start-end:watts", integer seconds and watts.
TimePowerMapping parse_mapping(std::string_view text, Direction direction);

netsim::Scenario parse_scenario(std::istream& in, const std::string& name);
netsim::Scenario load_scenario(const std::string& path);

struct RunFlags {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> repeat;
    std::string out;  // report path; stdout when empty
    bool no_delays = false;
    std::optional<std::string> solver;
    std::string trace;  // trace path; none when empty
    bool require_exact = false;
};

/// 0 success, 1 configuration or I/O error, 2 non-exact negotiation under require_exact.
int cmd_run(const RunFlags& flags, std::ostream& out, std::ostream& err);

struct SolveFlags {
    std::string demand;
    std::string offers;
    std::string mode = "auto";
    std::size_t bound = tvl::default_enumeration_bound;
};

/// Window used by bare magnitudes on the solve command line: one hour from 0.
inline constexpr TimeInterval default_window{0, 3600};

/// Parses "10", "0-900:10" or "0-900:10+900-1800:4" into one mapping.
TimePowerMapping parse_solve_mapping(std::string_view text, Direction direction, const std::string& what);

int cmd_solve(const SolveFlags& flags, std::ostream& out, std::ostream& err);

}  // namespace lpep::cli
