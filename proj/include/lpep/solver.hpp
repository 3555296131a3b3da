// Turns a disequilibrium and the replies collected for it into a Boolean
// exact-cover problem, solves it, and provides the best-effort relaxation
// used when the timer expires without an exact cover.
//
// Two atomizations are supported:
//   * GcdAtoms: time is cut into slices of delta_t = gcd of all durations and
//     power into quanta of delta_p = gcd of all magnitudes. An agent offering
//     m watts in a slice owns m / delta_p variables there and each slice
//     requires exactly demand / delta_p of them (a symmetric function).
//   * IntervalAtoms: power values partition [0, P_max] into ranges bounded by
//     the distinct magnitudes, and every (agent, time segment) pair owns a
//     single variable weighted by its real magnitude.

#pragma once

#include "lpep/core.hpp"
#include "lpep/tvl.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lpep::solver {

using tvl::VarId;

enum class AtomMode { Gcd, Intervals };
enum class SolverMode { Gcd, Intervals, Auto };

const char* to_string(AtomMode m);
const char* to_string(SolverMode m);
std::optional<SolverMode> parse_solver_mode(const std::string& s);

enum class Requirement { AllOrNothing, Prefix };

/// Multi-entry schedule replies accept time-ordered prefixes of their entries;
/// single-entry replies are all-or-nothing.
Requirement default_requirement(const TimePowerMapping& reply);

struct Reply {
    AgentId agent = 0;
    TimePowerMapping mapping;
    std::optional<Requirement> requirement;  // default_requirement when unset
};

struct PowerRange {
    Watts low = 0;
    Watts high = 0;

    friend bool operator==(const PowerRange&, const PowerRange&) = default;
};

struct AtomVar {
    std::size_t reply = 0;  // index into the reply list
    std::size_t time_index = 0;
    std::size_t power_index = 0;
};

struct AtomGrid {
    AtomMode mode = AtomMode::Gcd;
    Seconds delta_t = 0;  // GcdAtoms
    Watts delta_p = 0;    // GcdAtoms
    std::vector<PowerRange> power_intervals;  // IntervalAtoms
    std::vector<TimeInterval> time_subintervals;
    std::vector<AtomVar> vars;  // VarId -> (reply, time index, power index)
    std::vector<AgentId> agents;  // per reply
    Watts max_power = 0;

    std::size_t width() const { return vars.size(); }
    /// Number of power subintervals spanning [0, P_max]: N_gcd or N_intervals.
    std::size_t power_atom_count() const;
    std::string describe_partition() const;
};

class AtomExplosion : public Error {
public:
    AtomExplosion(std::size_t atoms, std::size_t variables, std::size_t bound);
    std::size_t atoms;
    std::size_t variables;
    std::size_t bound;
};

/// Throws AtomExplosion when the variable count exceeds `bound`.
AtomGrid atomize_gcd(const TimePowerMapping& demand, std::span<const Reply> replies,
                     std::size_t bound = tvl::default_enumeration_bound);
AtomGrid atomize_intervals(const TimePowerMapping& demand, std::span<const Reply> replies);

struct AgentRequirement {
    std::size_t reply = 0;
    AgentId agent = 0;
    Requirement kind = Requirement::AllOrNothing;
    std::vector<std::vector<VarId>> groups;  // one group per clipped reply entry
    tvl::TernaryVectorList function{0};
};

struct CoverProblem {
    AtomGrid grid;
    TimePowerMapping demand;
    std::vector<Reply> replies;  // clipped to the demand window
    std::vector<Watts> target;  // watts per time subinterval
    std::vector<std::int64_t> target_units;  // atoms (gcd) or watts (intervals)
    std::vector<std::vector<VarId>> slice_vars;
    std::vector<std::int64_t> weights;  // per VarId, threshold units
    std::vector<Watts> contributions;  // per VarId, watts
    std::vector<AgentRequirement> requirements;
    std::size_t enumeration_bound = tvl::default_enumeration_bound;

    std::size_t width() const { return grid.width(); }
};

CoverProblem build_cover(const TimePowerMapping& demand, std::span<const Reply> replies, AtomMode mode,
                         std::size_t bound = tvl::default_enumeration_bound);

/// Explicit conjunction of every threshold and requirement function. Only for
/// small problems; the solvers use the streaming form.
tvl::TernaryVectorList cover_function(const CoverProblem& cp, bool at_most = false);

struct Solution {
    tvl::Assignment assignment;
    std::vector<std::pair<AgentId, TimePowerMapping>> accepted;  // by ascending agent id
    std::vector<Watts> matched_power;  // per time subinterval
    bool exact = false;

    std::int64_t matched_energy(const AtomGrid& grid) const;
    std::vector<AgentId> accepted_agents() const;
    /// Union of accepted mappings in the given direction.
    TimePowerMapping matched_mapping(Direction direction) const;
};

/// Exact cover or none. Throws tvl::EnumerationTooLarge past the bound.
std::optional<Solution> solve_exact(const CoverProblem& cp);
/// Per-subinterval thresholds relaxed to "at most"; maximizes matched energy.
Solution solve_best_effort(const CoverProblem& cp);

/// Deterministic pick among satisfying assignments: (1) most matched energy,
/// (2) fewest accepted agents, (3) lexicographically smallest agent id set,
/// (4) lexicographically smallest per-agent acceptance levels.
Solution select_solution(std::span<const tvl::Assignment> candidates, const CoverProblem& cp);

struct Resolution {
    Solution solution;
    AtomMode mode = AtomMode::Gcd;
    std::size_t atom_count = 0;
    std::size_t variables = 0;
    std::string partition;
};

/// solve_exact, then solve_best_effort if no exact cover exists. In Auto mode
/// GcdAtoms is tried first and IntervalAtoms used on AtomExplosion.
Resolution resolve(const TimePowerMapping& demand, std::span<const Reply> replies, SolverMode mode,
                   std::size_t bound = tvl::default_enumeration_bound);

}  // namespace lpep::solver
