#include "lpep/netsim.hpp"
#include "lpep/wire.hpp"

#include <cmath>
#include <queue>

namespace lpep::netsim {

RunawaySimulation::RunawaySimulation(std::size_t cap, SimTrace prefix_)
    : Error("event cap of " + std::to_string(cap) + " exceeded"), prefix(std::move(prefix_)) {}

Micros effective_timer(const Scenario& scenario, const DelayMatrix& delays) {
    Micros timer = scenario.protocol.timer;
    if (scenario.protocol.timer_diameter_factor) {
        const double scaled =
            std::ceil(*scenario.protocol.timer_diameter_factor *
                      static_cast<double>(overlay_delay_diameter(scenario.grid, delays)));
        timer = std::max(timer, static_cast<Micros>(scaled));
    }
    return timer;
}

namespace {

struct Deliver {
    AgentId to = 0;
    wire::Bytes bytes;
};
struct Timer {
    AgentId agent = 0;
    MessageId request_id;
};
struct Trigger {
    std::size_t index = 0;
};

struct Event {
    Micros time = 0;
    std::uint64_t seq = 0;
    std::variant<Deliver, Timer, Trigger> what;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
    }
};

TraceKind trace_kind(protocol::NoteKind k) {
    using protocol::NoteKind;
    switch (k) {
    case NoteKind::Opened:
        return TraceKind::Open;
    case NoteKind::Closed:
        return TraceKind::Close;
    case NoteKind::LateReply:
        return TraceKind::Late;
    case NoteKind::RoutelessReply:
        return TraceKind::Routeless;
    case NoteKind::DuplicateInitial:
        return TraceKind::Duplicate;
    case NoteKind::DuplicateAck:
        return TraceKind::DuplicateAck;
    case NoteKind::InitiationRejected:
        return TraceKind::Rejected;
    case NoteKind::StaleTimer:
        return TraceKind::StaleTimer;
    case NoteKind::Malformed:
        return TraceKind::Malformed;
    case NoteKind::SolverFailed:
        return TraceKind::SolverFailed;
    }
    return TraceKind::Malformed;
}

TraceRecord message_record(TraceKind kind, Micros now, AgentId src, AgentId dst, const Notification& n,
                           std::size_t bytes) {
    TraceRecord r;
    r.time_us = now;
    r.kind = kind;
    r.src = src;
    r.dst = dst;
    r.msg_kind = n.kind;
    r.bytes = bytes;
    r.negotiation_id = n.negotiation_id();
    r.message_id = n.id;
    r.origin = n.origin;
    r.ack = n.ack_status;
    r.reply = n.is_reply();
    r.mapping = n.mapping;
    return r;
}

class Simulation {
public:
    Simulation(const Scenario& scenario, std::uint64_t seed, const RunOptions& options)
        : scenario_(scenario) {
        scenario.validate();
        const IctTopology ict = sample_link_delays(scenario.ict, seed);
        result_.delays = options.zero_delays ? DelayMatrix::zero(ict.agents) : delay_matrix(ict);
        result_.timer = effective_timer(scenario, result_.delays);
        result_.trace.seed = seed;
        result_.trace.repetition = options.repetition;

        protocol::AgentConfig config;
        config.timer = result_.timer;
        config.solver = options.solver.value_or(scenario.protocol.solver);
        config.enumeration_bound = scenario.protocol.enumeration_bound;
        for (AgentId id : scenario.grid.nodes) {
            protocol::Capacity capacity;
            for (const auto& spec : scenario.agents) {
                if (spec.id == id) {
                    capacity = spec.capacity;
                }
            }
            agents_.emplace(id, protocol::Agent(id, scenario.grid.neighbors(id), capacity, config));
        }
        for (std::size_t i = 0; i < scenario.disequilibria.size(); ++i) {
            schedule(scenario.disequilibria[i].trigger, Trigger{i});
        }
    }

    SimResult run() {
        std::size_t processed = 0;
        while (!queue_.empty()) {
            Event ev = queue_.top();
            if (ev.time > scenario_.run.time_limit) {
                break;
            }
            queue_.pop();
            if (++processed > scenario_.run.event_cap) {
                throw RunawaySimulation(scenario_.run.event_cap, std::move(result_.trace));
            }
            now_ = ev.time;
            std::visit([this](auto& e) { dispatch(e); }, ev.what);
        }
        result_.end_time = now_;
        for (const auto& [id, agent] : agents_) {
            result_.counters[id] = agent.counters();
        }
        return std::move(result_);
    }

private:
    void schedule(Micros at, std::variant<Deliver, Timer, Trigger> what) {
        queue_.push(Event{at, next_seq_++, std::move(what)});
    }

    void dispatch(const Trigger& t) {
        const auto& d = scenario_.disequilibria[t.index];
        perform(d.agent, agents_.at(d.agent).handle(protocol::LocalDisequilibrium{d.mapping, d.direction}, now_));
    }

    void dispatch(const Timer& t) {
        TraceRecord r;
        r.time_us = now_;
        r.kind = TraceKind::Timer;
        r.src = t.agent;
        r.negotiation_id = t.request_id;
        result_.trace.records.push_back(std::move(r));
        perform(t.agent, agents_.at(t.agent).handle(protocol::TimerFired{t.request_id}, now_));
    }

    void dispatch(const Deliver& d) {
        Notification n;
        try {
            n = wire::decode(d.bytes);
        } catch (const wire::DecodeError&) {
            TraceRecord r;
            r.time_us = now_;
            r.kind = TraceKind::Malformed;
            r.dst = d.to;
            r.bytes = d.bytes.size();
            result_.trace.records.push_back(std::move(r));
            return;
        }
        result_.trace.records.push_back(message_record(TraceKind::Deliver, now_, n.sender, d.to, n, d.bytes.size()));
        perform(d.to, agents_.at(d.to).handle(protocol::MessageArrived{std::move(n)}, now_));
    }

    void perform(AgentId self, const protocol::Actions& actions) {
        for (const auto& action : actions) {
            std::visit([&](const auto& a) { apply(self, a); }, action);
        }
    }

    void apply(AgentId self, const protocol::Send& s) {
        wire::Bytes bytes = wire::encode(s.message);
        result_.trace.records.push_back(message_record(TraceKind::Send, now_, self, s.to, s.message, bytes.size()));
        schedule(now_ + result_.delays(self, s.to), Deliver{s.to, std::move(bytes)});
    }

    void apply(AgentId self, const protocol::SetTimer& t) {
        schedule(now_ + t.delay, Timer{self, t.request_id});
    }

    void apply(AgentId self, const protocol::Commit& c) {
        amount_record(TraceKind::Commit, self, c.request_id, c.mapping);
    }

    void apply(AgentId self, const protocol::Release& c) {
        amount_record(TraceKind::Release, self, c.request_id, c.mapping);
    }

    void apply(AgentId self, const protocol::Note& note) {
        TraceRecord r;
        r.time_us = now_;
        r.kind = trace_kind(note.kind);
        r.src = self;
        if (note.peer != self) {
            r.dst = note.peer;
        }
        r.negotiation_id = note.request_id;
        r.outcome = note.outcome;
        if (note.kind == protocol::NoteKind::Closed && note.outcome) {
            result_.outcomes.push_back(*note.outcome);
        }
        result_.trace.records.push_back(std::move(r));
    }

    void amount_record(TraceKind kind, AgentId self, const MessageId& request, const TimePowerMapping& m) {
        TraceRecord r;
        r.time_us = now_;
        r.kind = kind;
        r.src = self;
        r.negotiation_id = request;
        r.mapping = m;
        result_.trace.records.push_back(std::move(r));
    }

    const Scenario& scenario_;
    std::map<AgentId, protocol::Agent> agents_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t next_seq_ = 0;
    Micros now_ = 0;
    SimResult result_;
};

}  // namespace

SimResult run(const Scenario& scenario, std::uint64_t seed, const RunOptions& options) {
    return Simulation(scenario, seed, options).run();
}

}  // namespace lpep::netsim
