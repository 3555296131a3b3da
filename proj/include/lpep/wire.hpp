// Canonical binary frame for notifications and metrics aggregation over traces.
//
// Frame layout, big-endian:
//
//   header (48 bytes)
//     version      u8   (= 1)
//     kind         u8   (1 demand, 2 offer, 3 acceptance, 4 ack)
//     id           16 bytes
//     correlation  16 bytes (all zero when absent)
//     origin       u32
//     sender       u32
//     hop_count    u16
//     payload_len  u32
//   payload
//     status       u8   (acks only: 1 confirm, 2 withdraw)
//     entry_count  u16
//     entries      entry_count x { start i64, end i64, magnitude i64 }
//
// The sign of `magnitude` carries the direction: positive supply, negative demand.

#pragma once

#include "lpep/core.hpp"
#include "lpep/trace.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lpep::wire {

inline constexpr std::uint8_t frame_version = 1;
inline constexpr std::size_t header_size = 48;
inline constexpr std::size_t entry_size = 24;

class EncodeError : public Error {
public:
    using Error::Error;
};

enum class DecodeErrorCode {
    TruncatedHeader,
    UnsupportedVersion,
    UnknownKind,
    PayloadLengthMismatch,
    TruncatedPayload,
    BadStatus,
    InvalidMapping,
    InvalidMessage,
};

const char* to_string(DecodeErrorCode c);

class DecodeError : public Error {
public:
    DecodeError(DecodeErrorCode code, const std::string& detail);
    DecodeErrorCode code;
};

using Bytes = std::vector<std::uint8_t>;

/// Throws EncodeError when a field does not fit its width or the message is invalid.
Bytes encode(const Notification& n);
Notification decode(std::span<const std::uint8_t> bytes);

/// 48 + 2 + 24 * entries, plus 1 for acks.
std::size_t encoded_size(const Notification& n);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

/// Population mean and standard deviation. Requires at least one sample.
Stat describe(std::span<const double> samples);

struct NegotiationMetrics {
    std::size_t repetition = 0;
    MessageId id;
    AgentId initiator = 0;
    std::size_t messages = 0;
    std::size_t bytes = 0;
    double period_s = 0.0;
    std::int64_t requested_ws = 0;
    std::int64_t accepted_ws = 0;
    std::int64_t confirmed_ws = 0;
    bool exact = false;
    std::size_t late_replies = 0;
    std::size_t withdrawals = 0;
};

struct MetricsReport {
    std::size_t negotiation_count = 0;
    Stat messages;
    Stat bytes_per_negotiation;
    Stat period_s;
    double matched_ratio = 0.0;  // confirmed / requested energy
    std::vector<NegotiationMetrics> negotiations;
};

/// Throws Error when no negotiation in the traces reached close.
MetricsReport aggregate(std::span<const netsim::SimTrace> traces);
MetricsReport aggregate(const netsim::SimTrace& trace);

/// Stable JSON document; identical reports serialize to identical bytes.
std::string to_json(const MetricsReport& report);

}  // namespace lpep::wire
