#include "lpep/trace.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace lpep::netsim {

using nlohmann::ordered_json;

namespace {

constexpr TraceKind all_kinds[] = {
    TraceKind::Send,      TraceKind::Deliver,      TraceKind::Timer,      TraceKind::Open,
    TraceKind::Close,     TraceKind::Late,         TraceKind::Routeless,  TraceKind::Duplicate,
    TraceKind::DuplicateAck, TraceKind::Rejected,  TraceKind::StaleTimer, TraceKind::Malformed,
    TraceKind::SolverFailed, TraceKind::Commit,    TraceKind::Release,
};

ordered_json mapping_json(const TimePowerMapping& m) {
    auto arr = ordered_json::array();
    for (const auto& e : m.entries()) {
        const Watts p = e.power.direction == Direction::Supply ? e.power.magnitude : -e.power.magnitude;
        arr.push_back(ordered_json::array({e.interval.start, e.interval.end, p}));
    }
    return arr;
}

TimePowerMapping mapping_from(const ordered_json& arr) {
    std::vector<MappingEntry> entries;
    for (const auto& e : arr) {
        const Watts p = e.at(2).get<Watts>();
        entries.push_back(MappingEntry{{e.at(0).get<Seconds>(), e.at(1).get<Seconds>()},
                                       PowerQuantum{p < 0 ? -p : p, p < 0 ? Direction::Demand : Direction::Supply}});
    }
    return TimePowerMapping(std::move(entries));
}

template <typename T>
ordered_json opt(const std::optional<T>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json opt_id(const std::optional<MessageId>& v) {
    return v ? ordered_json(v->to_string()) : ordered_json(nullptr);
}

ordered_json outcome_json(const protocol::NegotiationOutcome& o) {
    return ordered_json{
        {"request_id", o.request_id.to_string()},
        {"initiator", o.initiator},
        {"direction", to_string(o.direction)},
        {"requested", mapping_json(o.requested)},
        {"accepted", mapping_json(o.accepted)},
        {"confirmed", mapping_json(o.confirmed)},
        {"exact", o.exact},
        {"withdrawn", o.withdrawn},
        {"replies", o.replies},
        {"opened_us", o.opened_at},
        {"closed_us", o.closed_at},
    };
}

protocol::NegotiationOutcome outcome_from(const ordered_json& j) {
    protocol::NegotiationOutcome o;
    o.request_id = MessageId::parse(j.at("request_id").get<std::string>());
    o.initiator = j.at("initiator").get<AgentId>();
    o.direction = j.at("direction").get<std::string>() == "supply" ? Direction::Supply : Direction::Demand;
    o.requested = mapping_from(j.at("requested"));
    o.accepted = mapping_from(j.at("accepted"));
    o.confirmed = mapping_from(j.at("confirmed"));
    o.exact = j.at("exact").get<bool>();
    o.withdrawn = j.at("withdrawn").get<std::vector<AgentId>>();
    o.replies = j.at("replies").get<std::size_t>();
    o.opened_at = j.at("opened_us").get<Micros>();
    o.closed_at = j.at("closed_us").get<Micros>();
    return o;
}

template <typename T>
std::optional<T> get_opt(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<T>();
}

std::optional<MessageId> get_id(const ordered_json& j, const char* key) {
    if (auto s = get_opt<std::string>(j, key)) {
        return MessageId::parse(*s);
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(TraceKind k) {
    switch (k) {
    case TraceKind::Send:
        return "send";
    case TraceKind::Deliver:
        return "deliver";
    case TraceKind::Timer:
        return "timer";
    case TraceKind::Open:
        return "open";
    case TraceKind::Close:
        return "close";
    case TraceKind::Late:
        return "late";
    case TraceKind::Routeless:
        return "routeless";
    case TraceKind::Duplicate:
        return "duplicate";
    case TraceKind::DuplicateAck:
        return "duplicate_ack";
    case TraceKind::Rejected:
        return "rejected";
    case TraceKind::StaleTimer:
        return "stale_timer";
    case TraceKind::Malformed:
        return "malformed";
    case TraceKind::SolverFailed:
        return "solver_failed";
    case TraceKind::Commit:
        return "commit";
    case TraceKind::Release:
        return "release";
    }
    return "?";
}

std::optional<TraceKind> parse_trace_kind(const std::string& s) {
    for (auto k : all_kinds) {
        if (s == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

void write_trace(std::ostream& os, const SimTrace& trace) {
    for (const auto& r : trace.records) {
        ordered_json j;
        j["time_us"] = r.time_us;
        j["kind"] = to_string(r.kind);
        j["src"] = opt(r.src);
        j["dst"] = opt(r.dst);
        j["msg_kind"] = r.msg_kind ? ordered_json(to_string(*r.msg_kind)) : ordered_json(nullptr);
        j["bytes"] = r.bytes;
        j["negotiation_id"] = opt_id(r.negotiation_id);
        j["rep"] = trace.repetition;
        j["seed"] = trace.seed;
        if (r.message_id) {
            j["message_id"] = r.message_id->to_string();
        }
        if (r.origin) {
            j["origin"] = *r.origin;
        }
        if (r.ack) {
            j["ack"] = to_string(*r.ack);
        }
        if (r.reply) {
            j["reply"] = true;
        }
        if (r.mapping) {
            j["mapping"] = mapping_json(*r.mapping);
        }
        if (r.outcome) {
            j["outcome"] = outcome_json(*r.outcome);
        }
        os << j.dump() << '\n';
    }
}

std::vector<SimTrace> read_traces(std::istream& is) {
    std::vector<SimTrace> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            const auto j = ordered_json::parse(line);
            const auto rep = j.at("rep").get<std::size_t>();
            const auto seed = j.at("seed").get<std::uint64_t>();
            if (out.empty() || out.back().repetition != rep || out.back().seed != seed) {
                out.push_back(SimTrace{seed, rep, {}});
            }
            TraceRecord r;
            r.time_us = j.at("time_us").get<Micros>();
            const auto kind = parse_trace_kind(j.at("kind").get<std::string>());
            if (!kind) {
                throw Error("unknown record kind");
            }
            r.kind = *kind;
            r.src = get_opt<AgentId>(j, "src");
            r.dst = get_opt<AgentId>(j, "dst");
            if (auto mk = get_opt<std::string>(j, "msg_kind")) {
                r.msg_kind = parse_message_kind(*mk);
            }
            r.bytes = j.at("bytes").get<std::size_t>();
            r.negotiation_id = get_id(j, "negotiation_id");
            r.message_id = get_id(j, "message_id");
            r.origin = get_opt<AgentId>(j, "origin");
            if (auto a = get_opt<std::string>(j, "ack")) {
                r.ack = *a == "confirm" ? AckStatus::Confirm : AckStatus::Withdraw;
            }
            r.reply = j.value("reply", false);
            if (j.contains("mapping")) {
                r.mapping = mapping_from(j.at("mapping"));
            }
            if (j.contains("outcome")) {
                r.outcome = outcome_from(j.at("outcome"));
            }
            out.back().records.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw Error("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace lpep::netsim
