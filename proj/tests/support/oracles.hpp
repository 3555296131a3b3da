// Independent reference implementations used by the unit and acceptance tests.
// None of these call into the TVL engine or the cover solver; they enumerate.

#pragma once

#include "lpep/core.hpp"
#include "lpep/netsim.hpp"
#include "lpep/solver.hpp"
#include "lpep/tvl.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using namespace lpep;

// ---------------------------------------------------------------------------
// TVL truth tables. Assignment numbering follows tvl::Assignment: variable i
// is bit (width - 1 - i).

inline bool bit(std::uint64_t a, std::size_t width, std::size_t v) {
    return ((a >> (width - 1 - v)) & 1U) != 0;
}

inline bool row_matches(const tvl::TernaryVector& row, std::uint64_t a) {
    for (std::size_t v = 0; v < row.width(); ++v) {
        const auto t = row.get(static_cast<tvl::VarId>(v));
        if (t == tvl::Ternary::Dash) {
            continue;
        }
        if ((t == tvl::Ternary::One) != bit(a, row.width(), v)) {
            return false;
        }
    }
    return true;
}

inline std::vector<std::uint64_t> truth_set(const tvl::TernaryVectorList& list) {
    std::vector<std::uint64_t> out;
    const std::uint64_t n = std::uint64_t{1} << list.width();
    for (std::uint64_t a = 0; a < n; ++a) {
        for (const auto& row : list.rows()) {
            if (row_matches(row, a)) {
                out.push_back(a);
                break;
            }
        }
    }
    return out;
}

inline std::vector<std::uint64_t> bits_of(const std::vector<tvl::Assignment>& as) {
    std::vector<std::uint64_t> out;
    for (const auto& a : as) {
        out.push_back(a.bits);
    }
    return out;
}

inline std::size_t popcount_over(std::uint64_t a, std::size_t width, const std::vector<tvl::VarId>& vars) {
    std::size_t n = 0;
    for (auto v : vars) {
        n += bit(a, width, v) ? 1 : 0;
    }
    return n;
}

inline tvl::TernaryVectorList random_list(std::mt19937_64& rng, std::size_t width, std::size_t max_rows) {
    tvl::TernaryVectorList list(width);
    const std::size_t rows = rng() % (max_rows + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        tvl::TernaryVector row(width);
        for (std::size_t v = 0; v < width; ++v) {
            row.set(static_cast<tvl::VarId>(v), static_cast<tvl::Ternary>(rng() % 3));
        }
        list.append(row);
    }
    return list;
}

// ---------------------------------------------------------------------------
// Cover problems by enumeration over acceptance levels. A reply accepted at
// level p contributes its first p entries; all-or-nothing replies only have
// levels 0 and "all".

struct Reply {
    AgentId agent = 0;
    TimePowerMapping mapping;
    solver::Requirement requirement = solver::Requirement::AllOrNothing;
};

struct CoverVerdict {
    bool exact_exists = false;
    std::int64_t best_energy = 0;  // max matched watt-seconds with no over-cover
    std::vector<AgentId> exact_agents;  // preferred exact cover: fewest agents, then smallest ids
    std::vector<AgentId> best_agents;  // same preference among max-energy feasible sets
};

inline std::vector<Seconds> cuts_of(const TimePowerMapping& demand, const std::vector<TimePowerMapping>& replies) {
    std::set<Seconds> cuts;
    for (const auto& e : demand.entries()) {
        cuts.insert(e.interval.start);
        cuts.insert(e.interval.end);
    }
    for (const auto& r : replies) {
        for (const auto& e : r.entries()) {
            cuts.insert(e.interval.start);
            cuts.insert(e.interval.end);
        }
    }
    return {cuts.begin(), cuts.end()};
}

inline bool preferred(const std::vector<AgentId>& a, const std::vector<AgentId>& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

inline CoverVerdict brute_force(const TimePowerMapping& demand, const std::vector<Reply>& replies) {
    CoverVerdict verdict;
    if (demand.empty()) {
        verdict.exact_exists = true;
        return verdict;
    }
    const TimeInterval window = demand.span();
    std::vector<TimePowerMapping> clipped;
    std::vector<std::size_t> max_level;
    for (const auto& r : replies) {
        // Clip by hand so the oracle does not lean on the library's clipping.
        std::vector<MappingEntry> kept;
        for (const auto& e : r.mapping.entries()) {
            const Seconds s = std::max(e.interval.start, window.start);
            const Seconds t = std::min(e.interval.end, window.end);
            if (s < t) {
                kept.push_back(MappingEntry{{s, t}, e.power});
            }
        }
        clipped.emplace_back(std::move(kept));
        max_level.push_back(clipped.back().size());
    }
    const auto cuts = cuts_of(demand, clipped);

    std::vector<std::size_t> level(replies.size(), 0);
    bool have_best = false;
    while (true) {
        // Evaluate this combination.
        bool exact = true;
        bool feasible = true;
        std::int64_t energy = 0;
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const Seconds t = cuts[c];
            if (t < window.start || t >= window.end) {
                continue;
            }
            Watts sum = 0;
            for (std::size_t i = 0; i < clipped.size(); ++i) {
                const auto& entries = clipped[i].entries();
                for (std::size_t j = 0; j < level[i]; ++j) {
                    if (entries[j].interval.contains(t)) {
                        sum += entries[j].power.magnitude;
                    }
                }
            }
            const Watts want = demand.power_at(t);
            exact = exact && sum == want;
            feasible = feasible && sum <= want;
            energy += sum * (cuts[c + 1] - cuts[c]);
        }
        std::vector<AgentId> agents;
        for (std::size_t i = 0; i < replies.size(); ++i) {
            if (level[i] > 0) {
                agents.push_back(replies[i].agent);
            }
        }
        std::sort(agents.begin(), agents.end());
        if (exact) {
            if (!verdict.exact_exists || preferred(agents, verdict.exact_agents)) {
                verdict.exact_agents = agents;
            }
            verdict.exact_exists = true;
        }
        if (feasible) {
            if (!have_best || energy > verdict.best_energy ||
                (energy == verdict.best_energy && preferred(agents, verdict.best_agents))) {
                verdict.best_energy = energy;
                verdict.best_agents = agents;
            }
            have_best = true;
        }

        // Next combination (mixed radix).
        std::size_t i = 0;
        for (; i < replies.size(); ++i) {
            const bool aon = replies[i].requirement == solver::Requirement::AllOrNothing;
            if (aon) {
                if (level[i] == 0 && max_level[i] > 0) {
                    level[i] = max_level[i];
                    break;
                }
            } else if (level[i] < max_level[i]) {
                ++level[i];
                break;
            }
            level[i] = 0;
        }
        if (i == replies.size()) {
            break;
        }
    }
    return verdict;
}

inline std::vector<solver::Reply> to_solver(const std::vector<Reply>& replies) {
    std::vector<solver::Reply> out;
    for (const auto& r : replies) {
        out.push_back(solver::Reply{r.agent, r.mapping, r.requirement});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Trace invariants for the handshake. Each returned string is one violation.

struct TraceLimits {
    Micros timer = 0;
    Micros max_delay = 0;
};

inline std::vector<std::string> check_trace(const netsim::SimTrace& trace, const TraceLimits& limits) {
    using netsim::TraceKind;
    std::vector<std::string> bad;
    const auto& recs = trace.records;

    // Causality: time never runs backwards and every delivery has a prior send.
    std::map<std::tuple<MessageId, AgentId, AgentId>, std::vector<Micros>> in_flight;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        if (i > 0 && r.time_us < recs[i - 1].time_us) {
            bad.push_back("time runs backwards at record " + std::to_string(i));
        }
        if (r.kind == TraceKind::Send) {
            in_flight[{*r.message_id, *r.src, *r.dst}].push_back(r.time_us);
        } else if (r.kind == TraceKind::Deliver) {
            auto& q = in_flight[{*r.message_id, *r.src, *r.dst}];
            if (q.empty() || q.front() > r.time_us) {
                bad.push_back("delivery without prior send at record " + std::to_string(i));
            } else {
                q.erase(q.begin());
            }
        }
    }

    // Per negotiation bookkeeping.
    struct Legs {
        std::optional<Micros> initial_at_responder;
        std::optional<Micros> reply_sent;
        std::optional<Micros> reply_at_initiator;
        std::optional<Micros> acceptance_sent;
        std::optional<Micros> acceptance_at_responder;
        std::optional<Micros> ack_sent;
        std::optional<Micros> ack_at_initiator;
        std::size_t replies_sent = 0;
        std::size_t acceptances = 0;
        std::size_t acks = 0;
    };
    std::map<MessageId, AgentId> initiator;
    std::map<MessageId, Micros> opened;
    std::map<MessageId, std::size_t> closes;
    std::map<std::pair<MessageId, AgentId>, Legs> legs;
    std::map<std::tuple<MessageId, AgentId, AgentId>, std::size_t> forwards;
    std::map<MessageId, TimePowerMapping> responder_commits;
    std::map<MessageId, TimePowerMapping> responder_releases;

    for (const auto& r : recs) {
        if (r.kind == TraceKind::Open && r.negotiation_id) {
            initiator[*r.negotiation_id] = *r.src;
            opened[*r.negotiation_id] = r.time_us;
        }
    }
    for (const auto& r : recs) {
        if (!r.negotiation_id) {
            continue;
        }
        const MessageId nid = *r.negotiation_id;
        if (!initiator.contains(nid)) {
            if (r.kind == TraceKind::Send || r.kind == TraceKind::Deliver) {
                bad.push_back("message for unopened negotiation " + nid.to_string());
            }
            continue;
        }
        const AgentId init = initiator[nid];
        const bool message = r.kind == TraceKind::Send || r.kind == TraceKind::Deliver;
        const bool initial = message && is_initial(*r.msg_kind) && !r.reply;
        if (r.kind == TraceKind::Send && initial) {
            if (++forwards[{nid, *r.src, *r.dst}] > 1) {
                bad.push_back("agent " + std::to_string(*r.src) + " sent the initial of " + nid.to_string() +
                              " to " + std::to_string(*r.dst) + " twice");
            }
        }
        if (r.kind == TraceKind::Deliver && initial) {
            auto& l = legs[{nid, *r.dst}];
            if (!l.initial_at_responder) {
                l.initial_at_responder = r.time_us;
            }
        }
        if (message && r.reply) {
            auto& l = legs[{nid, *r.origin}];
            if (r.kind == TraceKind::Send && *r.src == *r.origin) {
                ++l.replies_sent;
                l.reply_sent = r.time_us;
                if (!l.initial_at_responder || *l.initial_at_responder > r.time_us) {
                    bad.push_back("reply from " + std::to_string(*r.origin) + " before the initial reached it");
                }
            }
            if (r.kind == TraceKind::Deliver && *r.dst == init && !l.reply_at_initiator) {
                l.reply_at_initiator = r.time_us;
            }
        }
        if (message && *r.msg_kind == MessageKind::Acceptance) {
            auto& l = legs[{nid, *r.dst}];
            if (r.kind == TraceKind::Send) {
                ++l.acceptances;
                l.acceptance_sent = r.time_us;
                if (!l.reply_at_initiator || *l.reply_at_initiator > r.time_us) {
                    bad.push_back("acceptance to " + std::to_string(*r.dst) + " before its reply arrived");
                }
            } else {
                l.acceptance_at_responder = r.time_us;
            }
        }
        if (message && *r.msg_kind == MessageKind::AcceptanceAck) {
            auto& l = legs[{nid, *r.origin}];
            if (r.kind == TraceKind::Send) {
                ++l.acks;
                l.ack_sent = r.time_us;
                if (!l.acceptance_at_responder || *l.acceptance_at_responder > r.time_us) {
                    bad.push_back("ack from " + std::to_string(*r.origin) + " before the acceptance arrived");
                }
            } else {
                l.ack_at_initiator = r.time_us;
            }
        }
        if (r.kind == TraceKind::Commit && *r.src != init) {
            responder_commits[nid] = piecewise_add(responder_commits[nid], *r.mapping, Direction::Supply);
        }
        if (r.kind == TraceKind::Close) {
            ++closes[nid];
            if (!r.outcome) {
                bad.push_back("close without outcome");
                continue;
            }
            const auto& o = *r.outcome;
            if (!dominates(o.requested, o.confirmed)) {
                bad.push_back("confirmed power exceeds the request in " + nid.to_string());
            }
            const bool full = o.requested.normalized() == o.confirmed.with_direction(o.direction).normalized();
            if (full != (o.exact && o.withdrawn.empty())) {
                bad.push_back("confirmed equals request iff exact without withdrawals, violated in " +
                              nid.to_string());
            }
            const auto committed = responder_commits[nid].with_direction(o.direction).normalized();
            if (committed != o.confirmed.normalized()) {
                bad.push_back("responder commitments differ from confirmed power in " + nid.to_string());
            }
            const Micros bound = limits.timer + 2 * limits.max_delay;
            if (r.time_us - opened[nid] > bound) {
                bad.push_back("negotiation " + nid.to_string() + " took longer than timer + 2 x max delay");
            }
        }
    }
    for (const auto& [key, l] : legs) {
        if (l.replies_sent > 1) {
            bad.push_back("agent " + std::to_string(key.second) + " replied twice");
        }
        if (l.acceptances > 1 || l.acks > 1) {
            bad.push_back("repeated acceptance or ack for agent " + std::to_string(key.second));
        }
        if (l.acceptance_sent && !l.ack_at_initiator) {
            bad.push_back("acceptance to " + std::to_string(key.second) + " never acknowledged");
        }
    }
    for (const auto& [nid, init] : initiator) {
        if (closes[nid] != 1) {
            bad.push_back("negotiation " + nid.to_string() + " closed " + std::to_string(closes[nid]) + " times");
        }
    }
    return bad;
}

inline TraceLimits limits_of(const netsim::SimResult& result) {
    return TraceLimits{result.timer, result.delays.max()};
}

}  // namespace oracle
