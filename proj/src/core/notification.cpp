#include "lpep/core.hpp"

#include <cstdio>

namespace lpep {

std::string MessageId::to_string() const {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return buf;
}

MessageId MessageId::parse(const std::string& hex) {
    if (hex.size() != 32) {
        throw Error("message id must be 32 hex digits: " + hex);
    }
    auto half = [&](std::size_t off) {
        std::uint64_t v = 0;
        for (std::size_t i = off; i < off + 16; ++i) {
            const char c = hex[i];
            int d;
            if (c >= '0' && c <= '9') {
                d = c - '0';
            } else if (c >= 'a' && c <= 'f') {
                d = c - 'a' + 10;
            } else if (c >= 'A' && c <= 'F') {
                d = c - 'A' + 10;
            } else {
                throw Error("bad hex digit in message id: " + hex);
            }
            v = (v << 4) | static_cast<std::uint64_t>(d);
        }
        return v;
    };
    return MessageId{half(0), half(16)};
}

const char* to_string(MessageKind k) {
    switch (k) {
    case MessageKind::Demand:
        return "demand";
    case MessageKind::Offer:
        return "offer";
    case MessageKind::Acceptance:
        return "acceptance";
    case MessageKind::AcceptanceAck:
        return "ack";
    }
    return "?";
}

const char* to_string(AckStatus s) {
    return s == AckStatus::Confirm ? "confirm" : "withdraw";
}

std::optional<MessageKind> parse_message_kind(const std::string& s) {
    for (auto k : {MessageKind::Demand, MessageKind::Offer, MessageKind::Acceptance, MessageKind::AcceptanceAck}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<std::string> validate(const Notification& n) {
    if (n.id.is_nil()) {
        return "nil message id";
    }
    if (n.correlation && n.correlation->is_nil()) {
        return "nil correlation id";
    }
    if ((n.kind == MessageKind::Acceptance || n.kind == MessageKind::AcceptanceAck) && !n.correlation) {
        return "acceptance without correlation";
    }
    if (n.ack_status.has_value() != (n.kind == MessageKind::AcceptanceAck)) {
        return "ack status present iff kind is ack";
    }
    if (is_initial(n.kind) && n.mapping.empty()) {
        return "empty mapping on demand/offer";
    }
    if (is_initial(n.kind)) {
        const Direction expected = n.kind == MessageKind::Demand ? Direction::Demand : Direction::Supply;
        if (n.mapping.direction() != expected) {
            return "mapping direction does not match kind";
        }
    }
    return std::nullopt;
}

}  // namespace lpep
