#include "lpep/wire.hpp"

#include <limits>

namespace lpep::wire {

const char* to_string(DecodeErrorCode c) {
    switch (c) {
    case DecodeErrorCode::TruncatedHeader:
        return "truncated header";
    case DecodeErrorCode::UnsupportedVersion:
        return "unsupported version";
    case DecodeErrorCode::UnknownKind:
        return "unknown kind";
    case DecodeErrorCode::PayloadLengthMismatch:
        return "payload length mismatch";
    case DecodeErrorCode::TruncatedPayload:
        return "truncated payload";
    case DecodeErrorCode::BadStatus:
        return "bad ack status";
    case DecodeErrorCode::InvalidMapping:
        return "invalid mapping";
    case DecodeErrorCode::InvalidMessage:
        return "invalid message";
    }
    return "?";
}

DecodeError::DecodeError(DecodeErrorCode c, const std::string& detail)
    : Error(std::string(to_string(c)) + (detail.empty() ? "" : ": " + detail)), code(c) {}

namespace {

class Writer {
public:
    explicit Writer(Bytes& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void be(std::uint64_t v, int width) {
        for (int i = width - 1; i >= 0; --i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void id(const MessageId& m) {
        be(m.hi, 8);
        be(m.lo, 8);
    }

private:
    Bytes& out_;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::size_t remaining() const { return in_.size() - pos_; }
    std::uint64_t be(int width) {
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) {
            v = (v << 8) | in_[pos_++];
        }
        return v;
    }
    MessageId id() {
        MessageId m;
        m.hi = be(8);
        m.lo = be(8);
        return m;
    }

private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::size_t encoded_size(const Notification& n) {
    return header_size + (n.kind == MessageKind::AcceptanceAck ? 1 : 0) + 2 + entry_size * n.mapping.size();
}

Bytes encode(const Notification& n) {
    if (auto why = validate(n)) {
        throw EncodeError("cannot encode invalid notification: " + *why);
    }
    if (n.hop_count > std::numeric_limits<std::uint16_t>::max()) {
        throw EncodeError("hop_count " + std::to_string(n.hop_count) + " exceeds 16 bits");
    }
    if (n.mapping.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw EncodeError("entry_count " + std::to_string(n.mapping.size()) + " exceeds 16 bits");
    }
    const std::size_t payload = encoded_size(n) - header_size;

    Bytes out;
    out.reserve(header_size + payload);
    Writer w(out);
    w.u8(frame_version);
    w.u8(static_cast<std::uint8_t>(n.kind));
    w.id(n.id);
    w.id(n.correlation.value_or(MessageId{}));
    w.be(n.origin, 4);
    w.be(n.sender, 4);
    w.be(n.hop_count, 2);
    w.be(payload, 4);
    if (n.kind == MessageKind::AcceptanceAck) {
        w.u8(static_cast<std::uint8_t>(*n.ack_status));
    }
    w.be(n.mapping.size(), 2);
    for (const auto& e : n.mapping.entries()) {
        const Watts signed_power =
            e.power.direction == Direction::Supply ? e.power.magnitude : -e.power.magnitude;
        w.be(static_cast<std::uint64_t>(e.interval.start), 8);
        w.be(static_cast<std::uint64_t>(e.interval.end), 8);
        w.be(static_cast<std::uint64_t>(signed_power), 8);
    }
    return out;
}

Notification decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < header_size) {
        throw DecodeError(DecodeErrorCode::TruncatedHeader,
                          std::to_string(bytes.size()) + " of " + std::to_string(header_size) + " bytes");
    }
    Reader r(bytes);
    const auto version = static_cast<std::uint8_t>(r.be(1));
    if (version != frame_version) {
        throw DecodeError(DecodeErrorCode::UnsupportedVersion, "version " + std::to_string(version));
    }
    const auto kind = static_cast<std::uint8_t>(r.be(1));
    if (kind < 1 || kind > 4) {
        throw DecodeError(DecodeErrorCode::UnknownKind, "kind " + std::to_string(kind));
    }
    Notification n;
    n.kind = static_cast<MessageKind>(kind);
    n.id = r.id();
    if (const MessageId c = r.id(); !c.is_nil()) {
        n.correlation = c;
    }
    n.origin = static_cast<AgentId>(r.be(4));
    n.sender = static_cast<AgentId>(r.be(4));
    n.hop_count = static_cast<std::uint32_t>(r.be(2));
    const std::uint64_t payload_len = r.be(4);
    if (payload_len != r.remaining()) {
        throw DecodeError(DecodeErrorCode::PayloadLengthMismatch,
                          "declared " + std::to_string(payload_len) + ", actual " + std::to_string(r.remaining()));
    }

    const bool is_ack = n.kind == MessageKind::AcceptanceAck;
    if (r.remaining() < (is_ack ? 3U : 2U)) {
        throw DecodeError(DecodeErrorCode::TruncatedPayload, "missing entry count");
    }
    if (is_ack) {
        const auto status = static_cast<std::uint8_t>(r.be(1));
        if (status != 1 && status != 2) {
            throw DecodeError(DecodeErrorCode::BadStatus, "status " + std::to_string(status));
        }
        n.ack_status = static_cast<AckStatus>(status);
    }
    const std::uint64_t count = r.be(2);
    if (r.remaining() < count * entry_size) {
        throw DecodeError(DecodeErrorCode::TruncatedPayload, std::to_string(count) + " entries declared");
    }
    if (r.remaining() > count * entry_size) {
        throw DecodeError(DecodeErrorCode::PayloadLengthMismatch, "trailing bytes after entries");
    }
    std::vector<MappingEntry> entries;
    for (std::uint64_t i = 0; i < count; ++i) {
        MappingEntry e;
        e.interval.start = static_cast<Seconds>(r.be(8));
        e.interval.end = static_cast<Seconds>(r.be(8));
        const auto p = static_cast<Watts>(r.be(8));
        if (p == std::numeric_limits<Watts>::min()) {
            throw DecodeError(DecodeErrorCode::InvalidMapping, "magnitude out of range");
        }
        e.power = PowerQuantum{p < 0 ? -p : p, p < 0 ? Direction::Demand : Direction::Supply};
        entries.push_back(e);
    }
    try {
        n.mapping = TimePowerMapping(std::move(entries));
    } catch (const InvalidMapping& ex) {
        throw DecodeError(DecodeErrorCode::InvalidMapping, ex.what());
    }
    if (auto why = validate(n)) {
        throw DecodeError(DecodeErrorCode::InvalidMessage, *why);
    }
    return n;
}

}  // namespace lpep::wire
