// Domain types shared by every module: schedule time, power, time-power
// mappings, identities and protocol messages.

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpep {

using AgentId = std::uint32_t;
using Seconds = std::int64_t;  // schedule time, integer seconds
using Watts = std::int64_t;    // non-negative magnitudes
using Micros = std::int64_t;   // simulation clock, fixed-point microseconds

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidMapping : public Error {
public:
    using Error::Error;
};

/// Half-open interval [start, end) in schedule seconds.
struct TimeInterval {
    Seconds start = 0;
    Seconds end = 0;

    Seconds duration() const { return end - start; }
    bool valid() const { return end > start; }
    bool contains(Seconds t) const { return t >= start && t < end; }
    bool contains(const TimeInterval& other) const {
        return other.start >= start && other.end <= end;
    }

    friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
    friend auto operator<=>(const TimeInterval&, const TimeInterval&) = default;
};

std::optional<TimeInterval> interval_intersect(const TimeInterval& a, const TimeInterval& b);

enum class Direction : std::uint8_t { Supply, Demand };

constexpr Direction opposite(Direction d) {
    return d == Direction::Supply ? Direction::Demand : Direction::Supply;
}

const char* to_string(Direction d);

struct PowerQuantum {
    Watts magnitude = 0;
    Direction direction = Direction::Supply;

    friend bool operator==(const PowerQuantum&, const PowerQuantum&) = default;
};

struct MappingEntry {
    TimeInterval interval;
    PowerQuantum power;

    friend bool operator==(const MappingEntry&, const MappingEntry&) = default;
};

/// A schedule fragment: ordered, non-overlapping entries of positive power
/// with one direction. The default-constructed mapping is empty and stands
/// for "no power" (withdrawals, zero disequilibria).
class TimePowerMapping {
public:
    TimePowerMapping() = default;

    /// Sorts by start and validates. Throws InvalidMapping on overlap,
    /// invalid intervals, non-positive magnitudes or mixed directions.
    explicit TimePowerMapping(std::vector<MappingEntry> entries);

    static TimePowerMapping single(TimeInterval interval, Watts magnitude, Direction direction);

    const std::vector<MappingEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    std::optional<Direction> direction() const;
    TimePowerMapping with_direction(Direction d) const;

    /// Magnitude in force at time t, 0 outside every entry.
    Watts power_at(Seconds t) const;
    Watts max_magnitude() const;
    /// Sum of magnitude x duration, in watt-seconds.
    std::int64_t energy() const;
    /// Smallest interval covering all entries. Requires a non-empty mapping.
    TimeInterval span() const;

    /// Sorted with touching entries of equal power merged. Idempotent.
    TimePowerMapping normalized() const;

    /// Entries clipped to the window; entries outside it are dropped.
    TimePowerMapping clipped(const TimeInterval& window) const;

    std::string to_string() const;

    friend bool operator==(const TimePowerMapping&, const TimePowerMapping&) = default;

private:
    std::vector<MappingEntry> entries_;
};

// Piecewise arithmetic over mappings viewed as step functions of time. Results
// are split at every breakpoint of either operand and are not merged.

/// min(a, b) wherever both are positive.
TimePowerMapping piecewise_min(const TimePowerMapping& a, const TimePowerMapping& b, Direction direction);
/// max(a - b, 0) over a's support.
TimePowerMapping piecewise_sub(const TimePowerMapping& a, const TimePowerMapping& b);
/// a + b over the union of supports.
TimePowerMapping piecewise_add(const TimePowerMapping& a, const TimePowerMapping& b, Direction direction);
/// True when a(t) >= b(t) at every t.
bool dominates(const TimePowerMapping& a, const TimePowerMapping& b);

/// Greatest common divisor of every entry duration. Throws Error("no intervals")
/// when there are no entries.
Seconds duration_gcd(std::span<const TimePowerMapping> mappings);
/// Greatest common divisor of every entry magnitude. Throws Error("no intervals")
/// when there are no entries.
Watts power_gcd(std::span<const TimePowerMapping> mappings);

/// 128-bit message identifier. The all-zero value is reserved for "none".
struct MessageId {
    std::uint64_t hi = 0;
    std::uint64_t lo = 0;

    bool is_nil() const { return hi == 0 && lo == 0; }
    std::string to_string() const;
    static MessageId parse(const std::string& hex);

    friend bool operator==(const MessageId&, const MessageId&) = default;
    friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

enum class MessageKind : std::uint8_t { Demand = 1, Offer = 2, Acceptance = 3, AcceptanceAck = 4 };
enum class AckStatus : std::uint8_t { Confirm = 1, Withdraw = 2 };

const char* to_string(MessageKind k);
const char* to_string(AckStatus s);
std::optional<MessageKind> parse_message_kind(const std::string& s);

constexpr bool is_initial(MessageKind k) {
    return k == MessageKind::Demand || k == MessageKind::Offer;
}

/// Counter-notification kind answering an initial of the given kind.
constexpr MessageKind complement(MessageKind k) {
    return k == MessageKind::Demand ? MessageKind::Offer : MessageKind::Demand;
}

struct Notification {
    MessageKind kind = MessageKind::Demand;
    MessageId id;
    std::optional<MessageId> correlation;
    AgentId origin = 0;
    AgentId sender = 0;
    std::uint32_t hop_count = 0;
    TimePowerMapping mapping;
    std::optional<AckStatus> ack_status;

    bool is_reply() const { return is_initial(kind) && correlation.has_value(); }

    /// Request this message belongs to: its own id for initials, else the correlation.
    MessageId negotiation_id() const { return correlation.value_or(id); }

    friend bool operator==(const Notification&, const Notification&) = default;
};

/// Checks the structural invariants of a notification; returns a reason on failure.
std::optional<std::string> validate(const Notification& n);

}  // namespace lpep
