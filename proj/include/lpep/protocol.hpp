// Agent state machine for the negotiation protocol: the four-way handshake
// (initial notification, counter-notification, acceptance, acknowledgement),
// match-or-forward propagation with ad-hoc reply routing, timer-driven
// best-effort acceptance and acknowledgement/withdrawal.
//
// Handlers are pure with respect to the outside world: an event goes in, the
// agent's own state changes, and a list of actions comes out. The simulator
// (or any other driver) performs the actions.

#pragma once

#include "lpep/core.hpp"
#include "lpep/solver.hpp"

#include <map>
#include <set>
#include <variant>
#include <vector>

namespace lpep::protocol {

struct Neighbor {
    AgentId id = 0;
    double impedance_ohm = 0.0;
};

/// Flexibility an agent can contribute to other agents' negotiations.
struct Capacity {
    TimePowerMapping supply;  // power it can deliver
    TimePowerMapping absorb;  // power it can take up
};

struct AgentConfig {
    Micros timer = 20'000;
    solver::SolverMode solver = solver::SolverMode::Auto;
    std::size_t enumeration_bound = tvl::default_enumeration_bound;
};

struct RoutingEntry {
    MessageId request_id;
    AgentId next_hop = 0;
    double cost = 0.0;  // impedance of the line towards next_hop
};

enum class Role { Initiator, Responder, Relay };
enum class Phase { Collecting, Accepting, Closed };

const char* to_string(Phase p);

struct NegotiationOutcome {
    MessageId request_id;
    AgentId initiator = 0;
    Direction direction = Direction::Demand;
    TimePowerMapping requested;
    TimePowerMapping accepted;   // what the solver matched
    TimePowerMapping confirmed;  // accepted minus withdrawals
    bool exact = false;
    std::vector<AgentId> withdrawn;
    std::size_t replies = 0;
    Micros opened_at = 0;
    Micros closed_at = 0;

    friend bool operator==(const NegotiationOutcome&, const NegotiationOutcome&) = default;
};

struct NegotiationState {
    Role role = Role::Relay;
    MessageId request_id;
    TimeInterval window;
    Phase phase = Phase::Collecting;

    // Initiator
    Direction direction = Direction::Demand;
    TimePowerMapping residual;
    std::vector<solver::Reply> replies;
    Micros opened_at = 0;
    Micros timer_deadline = 0;
    std::map<AgentId, TimePowerMapping> accepted;
    std::set<AgentId> pending_acks;
    TimePowerMapping confirmed;
    std::vector<AgentId> withdrawn;
    bool exact = false;

    // Responder
    AgentId initiator = 0;
    TimePowerMapping committed;  // what was offered in the reply
};

struct MessageArrived {
    Notification message;
};
struct TimerFired {
    MessageId request_id;
};
struct LocalDisequilibrium {
    TimePowerMapping mapping;
    Direction direction = Direction::Demand;
};
using AgentEvent = std::variant<MessageArrived, TimerFired, LocalDisequilibrium>;

struct Send {
    AgentId to = 0;
    Notification message;
};
struct SetTimer {
    MessageId request_id;
    Micros delay = 0;
};
struct Commit {
    MessageId request_id;
    TimePowerMapping mapping;
};
struct Release {
    MessageId request_id;
    TimePowerMapping mapping;
};

enum class NoteKind {
    Opened,
    Closed,
    LateReply,
    RoutelessReply,
    DuplicateInitial,
    DuplicateAck,
    InitiationRejected,
    StaleTimer,
    Malformed,
    SolverFailed,
};
const char* to_string(NoteKind k);

/// Observations for the trace; they carry no protocol effect.
struct Note {
    NoteKind kind = NoteKind::Opened;
    MessageId request_id;
    AgentId peer = 0;
    std::optional<NegotiationOutcome> outcome;
};

using AgentAction = std::variant<Send, SetTimer, Commit, Release, Note>;
using Actions = std::vector<AgentAction>;

struct Counters {
    std::size_t late_replies = 0;
    std::size_t routeless_replies = 0;
    std::size_t duplicate_initials = 0;
    std::size_t duplicate_acks = 0;
    std::size_t rejected_initiations = 0;
    std::size_t stale_timers = 0;
    std::size_t malformed = 0;
};

class Agent {
public:
    Agent(AgentId id, std::vector<Neighbor> neighbors, Capacity capacity, AgentConfig config = {});

    Actions handle(const AgentEvent& event, Micros now);

    Actions initiate(const TimePowerMapping& disequilibrium, Direction direction, Micros now);
    Actions on_initial_notification(const Notification& n);
    Actions route_reply(const Notification& n, Micros now);
    Actions on_timer_fired(const MessageId& request_id, Micros now);
    Actions on_acceptance(const Notification& n);
    Actions on_ack(const Notification& n, Micros now);
    Actions on_late_reply(const Notification& n);

    AgentId id() const { return id_; }
    const std::vector<Neighbor>& neighbors() const { return neighbors_; }
    const Counters& counters() const { return counters_; }
    const NegotiationState* negotiation(const MessageId& request_id) const;
    const RoutingEntry* route(const MessageId& request_id) const;
    bool has_seen(const MessageId& id) const { return seen_.contains(id); }
    /// Capacity in the given direction not yet committed.
    TimePowerMapping available(Direction d) const;
    const TimePowerMapping& committed(Direction d) const;

private:
    MessageId next_id();
    Notification make(MessageKind kind, std::optional<MessageId> correlation, TimePowerMapping mapping) const;
    Actions accept(NegotiationState& st, const solver::Solution& solution, Micros now);
    Actions close(NegotiationState& st, Micros now);

    AgentId id_;
    std::vector<Neighbor> neighbors_;
    Capacity capacity_;
    AgentConfig config_;
    std::uint64_t sequence_ = 0;
    TimePowerMapping committed_supply_;
    TimePowerMapping committed_absorb_;
    std::set<MessageId> seen_;
    std::map<MessageId, RoutingEntry> routes_;
    std::map<MessageId, NegotiationState> negotiations_;
    std::optional<MessageId> active_initiation_;
    Counters counters_;
};

}  // namespace lpep::protocol
