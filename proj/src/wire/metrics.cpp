#include "lpep/wire.hpp"

#include <json.hpp>

#include <cmath>
#include <map>

namespace lpep::wire {

Stat describe(std::span<const double> samples) {
    if (samples.empty()) {
        throw Error("statistics over no samples");
    }
    double sum = 0.0;
    for (double s : samples) {
        sum += s;
    }
    const double mean = sum / static_cast<double>(samples.size());
    double sq = 0.0;
    for (double s : samples) {
        sq += (s - mean) * (s - mean);
    }
    return Stat{mean, std::sqrt(sq / static_cast<double>(samples.size()))};
}

MetricsReport aggregate(std::span<const netsim::SimTrace> traces) {
    using netsim::TraceKind;
    MetricsReport report;
    std::int64_t requested = 0;
    std::int64_t confirmed = 0;

    for (const auto& trace : traces) {
        std::map<MessageId, std::pair<std::size_t, std::size_t>> traffic;  // messages, bytes
        std::map<MessageId, std::size_t> late;
        for (const auto& rec : trace.records) {
            if (!rec.negotiation_id) {
                continue;
            }
            if (rec.kind == TraceKind::Send) {
                auto& t = traffic[*rec.negotiation_id];
                ++t.first;
                t.second += rec.bytes;
            } else if (rec.kind == TraceKind::Late) {
                ++late[*rec.negotiation_id];
            }
        }
        for (const auto& rec : trace.records) {
            if (rec.kind != TraceKind::Close || !rec.outcome) {
                continue;
            }
            const auto& o = *rec.outcome;
            NegotiationMetrics m;
            m.repetition = trace.repetition;
            m.id = o.request_id;
            m.initiator = o.initiator;
            m.messages = traffic[o.request_id].first;
            m.bytes = traffic[o.request_id].second;
            m.period_s = static_cast<double>(o.closed_at - o.opened_at) / 1e6;
            m.requested_ws = o.requested.energy();
            m.accepted_ws = o.accepted.energy();
            m.confirmed_ws = o.confirmed.energy();
            m.exact = o.exact;
            m.late_replies = late[o.request_id];
            m.withdrawals = o.withdrawn.size();
            requested += m.requested_ws;
            confirmed += m.confirmed_ws;
            report.negotiations.push_back(m);
        }
    }
    if (report.negotiations.empty()) {
        throw Error("no closed negotiation in trace");
    }

    std::vector<double> messages, bytes, period;
    for (const auto& m : report.negotiations) {
        messages.push_back(static_cast<double>(m.messages));
        bytes.push_back(static_cast<double>(m.bytes));
        period.push_back(m.period_s);
    }
    report.negotiation_count = report.negotiations.size();
    report.messages = describe(messages);
    report.bytes_per_negotiation = describe(bytes);
    report.period_s = describe(period);
    report.matched_ratio = requested > 0 ? static_cast<double>(confirmed) / static_cast<double>(requested) : 1.0;
    return report;
}

MetricsReport aggregate(const netsim::SimTrace& trace) {
    return aggregate(std::span<const netsim::SimTrace>(&trace, 1));
}

std::string to_json(const MetricsReport& report) {
    using nlohmann::ordered_json;
    auto stat = [](const Stat& s) { return ordered_json{{"mean", s.mean}, {"stddev", s.stddev}}; };
    ordered_json doc;
    doc["negotiation_count"] = report.negotiation_count;
    doc["messages"] = stat(report.messages);
    doc["bytes_per_negotiation"] = stat(report.bytes_per_negotiation);
    doc["period_s"] = stat(report.period_s);
    doc["matched_ratio"] = report.matched_ratio;
    auto list = ordered_json::array();
    for (const auto& m : report.negotiations) {
        list.push_back(ordered_json{
            {"repetition", m.repetition},
            {"id", m.id.to_string()},
            {"initiator", m.initiator},
            {"messages", m.messages},
            {"bytes", m.bytes},
            {"period_s", m.period_s},
            {"requested_ws", m.requested_ws},
            {"accepted_ws", m.accepted_ws},
            {"confirmed_ws", m.confirmed_ws},
            {"exact", m.exact},
            {"late_replies", m.late_replies},
            {"withdrawals", m.withdrawals},
        });
    }
    doc["negotiations"] = std::move(list);
    return doc.dump(2) + "\n";
}

}  // namespace lpep::wire
