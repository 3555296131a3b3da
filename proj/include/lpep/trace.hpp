// Simulation trace: an append-only, time-ordered record of every message sent
// and delivered plus negotiation lifecycle marks. Exported as one JSON object
// per line with the stable fields time_us, kind, src, dst, msg_kind, bytes and
// negotiation_id (null when not applicable).

#pragma once

#include "lpep/core.hpp"
#include "lpep/protocol.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lpep::netsim {

enum class TraceKind {
    Send,
    Deliver,
    Timer,
    Open,
    Close,
    Late,
    Routeless,
    Duplicate,
    DuplicateAck,
    Rejected,
    StaleTimer,
    Malformed,
    SolverFailed,
    Commit,
    Release,
};

const char* to_string(TraceKind k);
std::optional<TraceKind> parse_trace_kind(const std::string& s);

struct TraceRecord {
    Micros time_us = 0;
    TraceKind kind = TraceKind::Send;
    std::optional<AgentId> src;
    std::optional<AgentId> dst;
    std::optional<MessageKind> msg_kind;
    std::size_t bytes = 0;
    std::optional<MessageId> negotiation_id;

    // Message detail for send/deliver.
    std::optional<MessageId> message_id;
    std::optional<AgentId> origin;
    std::optional<AckStatus> ack;
    bool reply = false;  // demand/offer carrying a correlation
    std::optional<TimePowerMapping> mapping;  // commit/release amount, message payload

    // Lifecycle detail for open/close.
    std::optional<protocol::NegotiationOutcome> outcome;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct SimTrace {
    std::uint64_t seed = 0;
    std::size_t repetition = 0;
    std::vector<TraceRecord> records;

    friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

void write_trace(std::ostream& os, const SimTrace& trace);
/// Reads every trace in a line-delimited file, grouped by repetition in file order.
std::vector<SimTrace> read_traces(std::istream& is);

}  // namespace lpep::netsim
