#include "lpep/solver.hpp"

#include <algorithm>
#include <tuple>

namespace lpep::solver {

CoverProblem build_cover(const TimePowerMapping& demand, std::span<const Reply> replies, AtomMode mode,
                         std::size_t bound) {
    CoverProblem cp;
    cp.enumeration_bound = bound;
    cp.grid = mode == AtomMode::Gcd ? atomize_gcd(demand, replies, bound) : atomize_intervals(demand, replies);
    cp.demand = demand;
    for (const auto& r : replies) {
        Reply clipped = r;
        clipped.mapping = demand.empty() ? TimePowerMapping{} : r.mapping.clipped(demand.span());
        cp.replies.push_back(std::move(clipped));
    }

    const auto& grid = cp.grid;
    const std::size_t slices = grid.time_subintervals.size();
    cp.slice_vars.resize(slices);
    for (const auto& slice : grid.time_subintervals) {
        const Watts t = demand.power_at(slice.start);
        cp.target.push_back(t);
        cp.target_units.push_back(mode == AtomMode::Gcd ? t / grid.delta_p : t);
    }
    for (VarId v = 0; v < grid.width(); ++v) {
        const auto& atom = grid.vars[v];
        cp.slice_vars[atom.time_index].push_back(v);
        const Watts m = cp.replies[atom.reply].mapping.power_at(grid.time_subintervals[atom.time_index].start);
        if (mode == AtomMode::Gcd) {
            cp.weights.push_back(1);
            cp.contributions.push_back(grid.delta_p);
        } else {
            cp.weights.push_back(m);
            cp.contributions.push_back(m);
        }
    }

    for (std::size_t r = 0; r < cp.replies.size(); ++r) {
        const auto& reply = cp.replies[r];
        if (reply.mapping.empty()) {
            continue;
        }
        AgentRequirement req;
        req.reply = r;
        req.agent = reply.agent;
        req.kind = reply.requirement.value_or(default_requirement(reply.mapping));
        req.groups.resize(reply.mapping.size());
        for (VarId v = 0; v < grid.width(); ++v) {
            const auto& atom = grid.vars[v];
            if (atom.reply != r) {
                continue;
            }
            const Seconds t = grid.time_subintervals[atom.time_index].start;
            const auto& entries = reply.mapping.entries();
            for (std::size_t j = 0; j < entries.size(); ++j) {
                if (entries[j].interval.contains(t)) {
                    req.groups[j].push_back(v);
                    break;
                }
            }
        }
        if (req.kind == Requirement::Prefix) {
            req.function = tvl::requirement_prefix(req.groups, grid.width());
        } else {
            std::vector<VarId> all;
            for (const auto& g : req.groups) {
                all.insert(all.end(), g.begin(), g.end());
            }
            req.function = tvl::requirement_all_or_nothing(all, grid.width());
        }
        cp.requirements.push_back(std::move(req));
    }
    return cp;
}

namespace {

std::vector<std::int64_t> slice_weights(const CoverProblem& cp, std::size_t s) {
    std::vector<std::int64_t> w;
    for (VarId v : cp.slice_vars[s]) {
        w.push_back(cp.weights[v]);
    }
    return w;
}

std::vector<tvl::Assignment> candidates(const CoverProblem& cp, bool at_most) {
    const std::size_t width = cp.width();
    if (width > std::min(cp.enumeration_bound, tvl::max_enumeration_bound)) {
        throw tvl::EnumerationTooLarge("enumeration too large: width " + std::to_string(width) +
                                       " exceeds bound " + std::to_string(cp.enumeration_bound));
    }
    auto rows = tvl::TernaryVectorList::tautology(width);
    for (const auto& req : cp.requirements) {
        rows = tvl::conjunction(rows, req.function);
    }
    for (std::size_t s = 0; s < cp.slice_vars.size() && !rows.empty(); ++s) {
        const std::int64_t hi = cp.target_units[s];
        rows = tvl::restrict_weighted(rows, cp.slice_vars[s], slice_weights(cp, s), at_most ? 0 : hi, hi);
    }
    return tvl::solutions(rows, cp.enumeration_bound);
}

struct Ranked {
    std::int64_t energy = 0;
    std::vector<AgentId> agents;
    std::vector<std::size_t> levels;  // by ascending agent id
};

Ranked rank(const tvl::Assignment& a, const CoverProblem& cp) {
    Ranked out;
    const auto& grid = cp.grid;
    for (VarId v = 0; v < grid.width(); ++v) {
        if (a[v]) {
            out.energy += cp.contributions[v] * grid.time_subintervals[grid.vars[v].time_index].duration();
        }
    }
    std::vector<std::pair<AgentId, std::size_t>> levels;
    for (const auto& req : cp.requirements) {
        std::size_t level = 0;
        for (const auto& g : req.groups) {
            if (!g.empty() && a[g.front()]) {
                ++level;
            }
        }
        levels.emplace_back(req.agent, level);
    }
    std::sort(levels.begin(), levels.end());
    for (const auto& [agent, level] : levels) {
        out.levels.push_back(level);
        if (level > 0) {
            out.agents.push_back(agent);
        }
    }
    return out;
}

bool better(const Ranked& x, const Ranked& y) {
    if (x.energy != y.energy) {
        return x.energy > y.energy;
    }
    if (x.agents.size() != y.agents.size()) {
        return x.agents.size() < y.agents.size();
    }
    return std::tie(x.agents, x.levels) < std::tie(y.agents, y.levels);
}

}  // namespace

tvl::TernaryVectorList cover_function(const CoverProblem& cp, bool at_most) {
    const std::size_t width = cp.width();
    auto f = tvl::TernaryVectorList::tautology(width);
    for (std::size_t s = 0; s < cp.slice_vars.size(); ++s) {
        const std::int64_t hi = cp.target_units[s];
        if (cp.grid.mode == AtomMode::Gcd && !at_most) {
            const auto& vars = cp.slice_vars[s];
            if (hi < 0 || static_cast<std::size_t>(hi) > vars.size()) {
                return tvl::TernaryVectorList(width);
            }
            f = tvl::conjunction(f, tvl::symmetric(vars, static_cast<std::size_t>(hi), width));
        } else {
            f = tvl::conjunction(
                f, tvl::weighted_range(cp.slice_vars[s], slice_weights(cp, s), at_most ? 0 : hi, hi, width));
        }
    }
    for (const auto& req : cp.requirements) {
        f = tvl::conjunction(f, req.function);
    }
    return f;
}

std::int64_t Solution::matched_energy(const AtomGrid& grid) const {
    std::int64_t total = 0;
    for (std::size_t s = 0; s < matched_power.size(); ++s) {
        total += matched_power[s] * grid.time_subintervals[s].duration();
    }
    return total;
}

std::vector<AgentId> Solution::accepted_agents() const {
    std::vector<AgentId> out;
    for (const auto& [agent, mapping] : accepted) {
        out.push_back(agent);
    }
    return out;
}

TimePowerMapping Solution::matched_mapping(Direction direction) const {
    TimePowerMapping total;
    for (const auto& [agent, mapping] : accepted) {
        total = piecewise_add(total, mapping, direction);
    }
    return total.normalized();
}

Solution select_solution(std::span<const tvl::Assignment> candidates, const CoverProblem& cp) {
    if (candidates.empty()) {
        throw Error("select_solution: no candidates");
    }
    std::size_t best = 0;
    Ranked best_rank = rank(candidates[0], cp);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        Ranked r = rank(candidates[i], cp);
        if (better(r, best_rank)) {
            best = i;
            best_rank = std::move(r);
        }
    }

    const auto& a = candidates[best];
    const auto& grid = cp.grid;
    Solution sol;
    sol.assignment = a;
    sol.matched_power.assign(grid.time_subintervals.size(), 0);
    for (VarId v = 0; v < grid.width(); ++v) {
        if (a[v]) {
            sol.matched_power[grid.vars[v].time_index] += cp.contributions[v];
        }
    }
    sol.exact = sol.matched_power == cp.target;

    for (const auto& req : cp.requirements) {
        std::vector<MappingEntry> taken;
        const auto& entries = cp.replies[req.reply].mapping.entries();
        for (std::size_t j = 0; j < req.groups.size(); ++j) {
            if (!req.groups[j].empty() && a[req.groups[j].front()]) {
                taken.push_back(entries[j]);
            }
        }
        if (!taken.empty()) {
            sol.accepted.emplace_back(req.agent, TimePowerMapping(std::move(taken)));
        }
    }
    std::sort(sol.accepted.begin(), sol.accepted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return sol;
}

std::optional<Solution> solve_exact(const CoverProblem& cp) {
    const auto found = candidates(cp, false);
    if (found.empty()) {
        return std::nullopt;
    }
    return select_solution(found, cp);
}

Solution solve_best_effort(const CoverProblem& cp) {
    // The all-zero assignment always satisfies "at most", so this is never empty.
    const auto found = candidates(cp, true);
    return select_solution(found, cp);
}

Resolution resolve(const TimePowerMapping& demand, std::span<const Reply> replies, SolverMode mode,
                   std::size_t bound) {
    auto attempt = [&](AtomMode m) {
        CoverProblem cp = build_cover(demand, replies, m, bound);
        Resolution r;
        r.mode = m;
        r.atom_count = cp.grid.power_atom_count();
        r.variables = cp.width();
        r.partition = cp.grid.describe_partition();
        if (auto exact = solve_exact(cp)) {
            r.solution = std::move(*exact);
        } else {
            r.solution = solve_best_effort(cp);
        }
        return r;
    };
    switch (mode) {
    case SolverMode::Gcd:
        return attempt(AtomMode::Gcd);
    case SolverMode::Intervals:
        return attempt(AtomMode::Intervals);
    case SolverMode::Auto:
        try {
            return attempt(AtomMode::Gcd);
        } catch (const AtomExplosion&) {
            return attempt(AtomMode::Intervals);
        }
    }
    return attempt(AtomMode::Intervals);
}

}  // namespace lpep::solver
