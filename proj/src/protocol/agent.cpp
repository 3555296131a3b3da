#include "lpep/protocol.hpp"

#include <algorithm>

namespace lpep::protocol {

const char* to_string(Phase p) {
    switch (p) {
    case Phase::Collecting:
        return "collecting";
    case Phase::Accepting:
        return "accepting";
    case Phase::Closed:
        return "closed";
    }
    return "?";
}

const char* to_string(NoteKind k) {
    switch (k) {
    case NoteKind::Opened:
        return "open";
    case NoteKind::Closed:
        return "close";
    case NoteKind::LateReply:
        return "late";
    case NoteKind::RoutelessReply:
        return "routeless";
    case NoteKind::DuplicateInitial:
        return "duplicate";
    case NoteKind::DuplicateAck:
        return "duplicate_ack";
    case NoteKind::InitiationRejected:
        return "rejected";
    case NoteKind::StaleTimer:
        return "stale_timer";
    case NoteKind::Malformed:
        return "malformed";
    case NoteKind::SolverFailed:
        return "solver_failed";
    }
    return "?";
}

Agent::Agent(AgentId id, std::vector<Neighbor> neighbors, Capacity capacity, AgentConfig config)
    : id_(id), neighbors_(std::move(neighbors)), capacity_(std::move(capacity)), config_(config) {}

const NegotiationState* Agent::negotiation(const MessageId& request_id) const {
    auto it = negotiations_.find(request_id);
    return it == negotiations_.end() ? nullptr : &it->second;
}

const RoutingEntry* Agent::route(const MessageId& request_id) const {
    auto it = routes_.find(request_id);
    return it == routes_.end() ? nullptr : &it->second;
}

const TimePowerMapping& Agent::committed(Direction d) const {
    return d == Direction::Supply ? committed_supply_ : committed_absorb_;
}

TimePowerMapping Agent::available(Direction d) const {
    const auto& cap = d == Direction::Supply ? capacity_.supply : capacity_.absorb;
    return piecewise_sub(cap.with_direction(d), committed(d)).normalized();
}

MessageId Agent::next_id() {
    return MessageId{id_, ++sequence_};
}

Notification Agent::make(MessageKind kind, std::optional<MessageId> correlation, TimePowerMapping mapping) const {
    Notification n;
    n.kind = kind;
    n.correlation = correlation;
    n.origin = id_;
    n.sender = id_;
    n.mapping = std::move(mapping);
    return n;
}

Actions Agent::handle(const AgentEvent& event, Micros now) {
    if (const auto* d = std::get_if<LocalDisequilibrium>(&event)) {
        return initiate(d->mapping, d->direction, now);
    }
    if (const auto* t = std::get_if<TimerFired>(&event)) {
        return on_timer_fired(t->request_id, now);
    }
    const Notification& n = std::get<MessageArrived>(event).message;
    if (validate(n)) {
        ++counters_.malformed;
        return {Note{NoteKind::Malformed, n.negotiation_id(), n.sender, std::nullopt}};
    }
    switch (n.kind) {
    case MessageKind::Demand:
    case MessageKind::Offer:
        return n.correlation ? route_reply(n, now) : on_initial_notification(n);
    case MessageKind::Acceptance:
        return on_acceptance(n);
    case MessageKind::AcceptanceAck:
        return on_ack(n, now);
    }
    return {};
}

Actions Agent::initiate(const TimePowerMapping& disequilibrium, Direction direction, Micros now) {
    if (disequilibrium.empty()) {
        return {};
    }
    if (active_initiation_) {
        ++counters_.rejected_initiations;
        return {Note{NoteKind::InitiationRejected, *active_initiation_, id_, std::nullopt}};
    }

    Notification n = make(direction == Direction::Demand ? MessageKind::Demand : MessageKind::Offer,
                          std::nullopt, disequilibrium.with_direction(direction));
    n.id = next_id();
    seen_.insert(n.id);
    active_initiation_ = n.id;

    NegotiationState st;
    st.role = Role::Initiator;
    st.request_id = n.id;
    st.window = n.mapping.span();
    st.direction = direction;
    st.residual = n.mapping;
    st.opened_at = now;
    st.timer_deadline = now + config_.timer;

    NegotiationOutcome opened;
    opened.request_id = n.id;
    opened.initiator = id_;
    opened.direction = direction;
    opened.requested = st.residual;
    opened.opened_at = now;

    Actions out;
    out.push_back(Note{NoteKind::Opened, n.id, id_, opened});
    for (const auto& nb : neighbors_) {
        out.push_back(Send{nb.id, n});
    }
    out.push_back(SetTimer{n.id, config_.timer});
    negotiations_.emplace(n.id, std::move(st));
    return out;
}

Actions Agent::on_initial_notification(const Notification& n) {
    if (!seen_.insert(n.id).second) {
        ++counters_.duplicate_initials;
        return {Note{NoteKind::DuplicateInitial, n.id, n.sender, std::nullopt}};
    }
    double impedance = 0.0;
    for (const auto& nb : neighbors_) {
        if (nb.id == n.sender) {
            impedance = nb.impedance_ohm;
        }
    }
    routes_[n.id] = RoutingEntry{n.id, n.sender, impedance};

    Actions out;
    const Direction offered = opposite(*n.mapping.direction());
    TimePowerMapping reply_mapping = piecewise_min(available(offered), n.mapping, offered);
    if (!reply_mapping.empty()) {
        Notification reply = make(complement(n.kind), n.id, reply_mapping);
        reply.id = next_id();
        out.push_back(Send{n.sender, reply});

        NegotiationState st;
        st.role = Role::Responder;
        st.request_id = n.id;
        st.window = n.mapping.span();
        st.initiator = n.origin;
        st.committed = reply_mapping;
        negotiations_[n.id] = std::move(st);
    }

    // Match-or-forward: only the unmatched remainder travels further.
    TimePowerMapping remainder = reply_mapping.empty() ? n.mapping : piecewise_sub(n.mapping, reply_mapping);
    if (!remainder.empty()) {
        Notification fwd = n;
        fwd.sender = id_;
        fwd.hop_count = n.hop_count + 1;
        fwd.mapping = std::move(remainder);
        for (const auto& nb : neighbors_) {
            if (nb.id != n.sender) {
                out.push_back(Send{nb.id, fwd});
            }
        }
    }
    return out;
}

Actions Agent::route_reply(const Notification& n, Micros now) {
    const MessageId request = *n.correlation;
    if (auto it = negotiations_.find(request); it != negotiations_.end() && it->second.role == Role::Initiator) {
        auto& st = it->second;
        if (st.phase != Phase::Collecting) {
            return on_late_reply(n);
        }
        const bool known = std::any_of(st.replies.begin(), st.replies.end(),
                                       [&](const solver::Reply& r) { return r.agent == n.origin; });
        if (known) {
            return {};
        }
        st.replies.push_back(solver::Reply{n.origin, n.mapping, std::nullopt});
        // An exact cover ends collection early; the timer only matters when none exists.
        try {
            auto r = solver::resolve(st.residual, st.replies, config_.solver, config_.enumeration_bound);
            if (r.solution.exact && !r.solution.accepted.empty()) {
                return accept(st, r.solution, now);
            }
        } catch (const Error&) {
        }
        return {};
    }
    if (const auto* entry = route(request)) {
        Notification fwd = n;
        fwd.sender = id_;
        fwd.hop_count = n.hop_count + 1;
        return {Send{entry->next_hop, fwd}};
    }
    ++counters_.routeless_replies;
    return {Note{NoteKind::RoutelessReply, request, n.origin, std::nullopt}};
}

Actions Agent::on_timer_fired(const MessageId& request_id, Micros now) {
    auto it = negotiations_.find(request_id);
    if (it == negotiations_.end() || it->second.role != Role::Initiator || it->second.phase != Phase::Collecting) {
        ++counters_.stale_timers;
        return {Note{NoteKind::StaleTimer, request_id, id_, std::nullopt}};
    }
    auto& st = it->second;

    Actions out;
    solver::Solution solution;
    try {
        solution = solver::resolve(st.residual, st.replies, config_.solver, config_.enumeration_bound).solution;
    } catch (const Error&) {
        out.push_back(Note{NoteKind::SolverFailed, request_id, id_, std::nullopt});
    }
    auto rest = accept(st, solution, now);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

Actions Agent::accept(NegotiationState& st, const solver::Solution& solution, Micros now) {
    st.exact = solution.exact;
    if (solution.accepted.empty()) {
        return close(st, now);
    }
    Actions out;
    const MessageId request_id = st.request_id;
    st.phase = Phase::Accepting;
    for (const auto& [agent, mapping] : solution.accepted) {
        st.accepted[agent] = mapping;
        st.pending_acks.insert(agent);
        Notification acc = make(MessageKind::Acceptance, request_id, mapping);
        acc.id = next_id();
        out.push_back(Send{agent, acc});
    }
    out.push_back(Commit{request_id, solution.matched_mapping(st.direction)});
    return out;
}

Actions Agent::on_acceptance(const Notification& n) {
    auto it = negotiations_.find(*n.correlation);
    const bool known = it != negotiations_.end() && it->second.role == Role::Responder &&
                       it->second.initiator == n.origin;
    if (known && it->second.phase == Phase::Closed) {
        return {};
    }

    Actions out;
    Notification ack = make(MessageKind::AcceptanceAck, *n.correlation, TimePowerMapping{});
    ack.id = next_id();
    ack.ack_status = AckStatus::Withdraw;
    if (known) {
        auto& st = it->second;
        st.phase = Phase::Closed;
        const Direction d = *st.committed.direction();
        const TimePowerMapping wanted = n.mapping.with_direction(d);
        if (!wanted.empty() && dominates(st.committed, wanted) && dominates(available(d), wanted)) {
            auto& pool = d == Direction::Supply ? committed_supply_ : committed_absorb_;
            pool = piecewise_add(pool, wanted, d).normalized();
            ack.ack_status = AckStatus::Confirm;
            ack.mapping = wanted;
            out.push_back(Commit{st.request_id, wanted});
        }
    }
    out.push_back(Send{n.origin, ack});
    return out;
}

Actions Agent::on_ack(const Notification& n, Micros now) {
    auto it = negotiations_.find(*n.correlation);
    if (it == negotiations_.end() || it->second.role != Role::Initiator || it->second.phase != Phase::Accepting ||
        !it->second.pending_acks.contains(n.origin)) {
        ++counters_.duplicate_acks;
        return {Note{NoteKind::DuplicateAck, *n.correlation, n.origin, std::nullopt}};
    }
    auto& st = it->second;
    st.pending_acks.erase(n.origin);

    Actions out;
    const TimePowerMapping& contribution = st.accepted.at(n.origin);
    if (n.ack_status == AckStatus::Confirm) {
        st.confirmed = piecewise_add(st.confirmed, contribution, st.direction).normalized();
    } else {
        st.withdrawn.push_back(n.origin);
        out.push_back(Release{st.request_id, contribution.with_direction(st.direction)});
    }
    if (st.pending_acks.empty()) {
        auto closed = close(st, now);
        out.insert(out.end(), closed.begin(), closed.end());
    }
    return out;
}

Actions Agent::on_late_reply(const Notification& n) {
    ++counters_.late_replies;
    return {Note{NoteKind::LateReply, *n.correlation, n.origin, std::nullopt}};
}

Actions Agent::close(NegotiationState& st, Micros now) {
    st.phase = Phase::Closed;
    if (active_initiation_ == st.request_id) {
        active_initiation_.reset();
    }
    NegotiationOutcome out;
    out.request_id = st.request_id;
    out.initiator = id_;
    out.direction = st.direction;
    out.requested = st.residual;
    for (const auto& [agent, mapping] : st.accepted) {
        out.accepted = piecewise_add(out.accepted, mapping, st.direction);
    }
    out.accepted = out.accepted.normalized();
    out.confirmed = st.confirmed;
    out.exact = st.exact;
    out.withdrawn = st.withdrawn;
    out.replies = st.replies.size();
    out.opened_at = st.opened_at;
    out.closed_at = now;
    return {Note{NoteKind::Closed, st.request_id, id_, std::move(out)}};
}

}  // namespace lpep::protocol
