// Deterministic discrete-event simulation of a negotiating agent population.
//
// Two topologies are involved. The grid overlay (impedance-weighted) decides
// who forwards notifications to whom. The ICT topology (agents plus wireless
// access points, per-link delays) decides how long a message between any two
// agents takes: the shortest-path delay through it.
//
// Time is fixed-point microseconds. Events pop in (time, seq) order, with seq
// assigned when an event is scheduled, so runs are a pure function of the
// scenario and seed.

#pragma once

#include "lpep/core.hpp"
#include "lpep/protocol.hpp"
#include "lpep/trace.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace lpep::netsim {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct GridEdge {
    AgentId a = 0;
    AgentId b = 0;
    double impedance_ohm = 0.0;
};

struct GridTopology {
    std::vector<AgentId> nodes;
    std::vector<GridEdge> edges;

    /// Throws ConfigError unless connected, undirected, loop-free with positive impedances.
    void validate() const;
    std::vector<protocol::Neighbor> neighbors(AgentId id) const;
    /// Longest shortest path, in hops.
    std::size_t hop_diameter() const;
};

struct IctNode {
    enum class Kind : std::uint8_t { Agent, AccessPoint };
    Kind kind = Kind::Agent;
    std::uint32_t id = 0;  // AgentId, or index into access_points

    friend bool operator==(const IctNode&, const IctNode&) = default;
    friend auto operator<=>(const IctNode&, const IctNode&) = default;
};

struct IctLink {
    IctNode a;
    IctNode b;
    std::optional<Micros> delay;  // unset links are sampled from the bounds
};

struct DelayBounds {
    Micros min = 10'000;
    Micros max = 100'000;
};

struct IctTopology {
    std::vector<AgentId> agents;
    std::vector<std::string> access_points;
    std::vector<IctLink> links;
    DelayBounds bounds;

    std::string name(const IctNode& n) const;
};

/// Uniform integers from std::mt19937_64, whose output sequence is fixed by
/// the standard. Range reduction is done here rather than through
/// std::uniform_int_distribution, whose algorithm varies between libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 engine_;
};

/// Fills every unset link delay uniformly from the bounds. Same seed, same delays.
IctTopology sample_link_delays(IctTopology ict, std::uint64_t seed);

class DelayMatrix {
public:
    DelayMatrix() = default;
    DelayMatrix(std::vector<AgentId> agents, std::vector<Micros> delays);
    static DelayMatrix zero(std::vector<AgentId> agents);

    Micros operator()(AgentId from, AgentId to) const;
    Micros max() const;
    const std::vector<AgentId>& agents() const { return agents_; }

private:
    std::size_t index(AgentId a) const;
    std::vector<AgentId> agents_;
    std::vector<Micros> delays_;
};

/// All-pairs agent delays via Dijkstra over the ICT graph. Requires every link
/// delay set; throws ConfigError naming the first disconnected pair.
DelayMatrix delay_matrix(const IctTopology& ict);

/// Longest fastest overlay path: grid edges weighted by the ICT delay between
/// their endpoints, maximized over agent pairs. A notification flooded from any
/// agent reaches every other agent within this time.
Micros overlay_delay_diameter(const GridTopology& grid, const DelayMatrix& delays);

struct AgentSpec {
    AgentId id = 0;
    protocol::Capacity capacity;
};

struct Disequilibrium {
    AgentId agent = 0;
    Micros trigger = 0;
    TimePowerMapping mapping;
    Direction direction = Direction::Demand;
};

struct ProtocolSettings {
    Micros timer = 20'000;
    /// When set, the effective timer is max(timer, factor x overlay delay diameter).
    std::optional<double> timer_diameter_factor;
    solver::SolverMode solver = solver::SolverMode::Auto;
    std::size_t enumeration_bound = tvl::default_enumeration_bound;
};

struct RunSettings {
    std::uint64_t seed = 1;
    std::size_t repetitions = 1;
    Micros time_limit = 60'000'000;
    std::size_t event_cap = 1'000'000;
};

struct Scenario {
    GridTopology grid;
    IctTopology ict;
    std::vector<AgentSpec> agents;
    std::vector<Disequilibrium> disequilibria;
    ProtocolSettings protocol;
    RunSettings run;

    /// Cross-reference checks shared by the parser and programmatic builders.
    void validate() const;
};

struct RunOptions {
    bool zero_delays = false;
    std::optional<solver::SolverMode> solver;
    std::size_t repetition = 0;
};

struct SimResult {
    SimTrace trace;
    std::vector<protocol::NegotiationOutcome> outcomes;  // in close order
    std::map<AgentId, protocol::Counters> counters;
    DelayMatrix delays;
    Micros timer = 0;
    Micros end_time = 0;
};

class RunawaySimulation : public Error {
public:
    RunawaySimulation(std::size_t cap, SimTrace prefix);
    SimTrace prefix;
};

SimResult run(const Scenario& scenario, std::uint64_t seed, const RunOptions& options = {});

/// Effective timer for a scenario under the given delays.
Micros effective_timer(const Scenario& scenario, const DelayMatrix& delays);

}  // namespace lpep::netsim
