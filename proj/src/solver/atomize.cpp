#include "lpep/solver.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace lpep::solver {

const char* to_string(AtomMode m) {
    return m == AtomMode::Gcd ? "gcd" : "intervals";
}

const char* to_string(SolverMode m) {
    switch (m) {
    case SolverMode::Gcd:
        return "gcd";
    case SolverMode::Intervals:
        return "intervals";
    case SolverMode::Auto:
        return "auto";
    }
    return "?";
}

std::optional<SolverMode> parse_solver_mode(const std::string& s) {
    for (auto m : {SolverMode::Gcd, SolverMode::Intervals, SolverMode::Auto}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    return std::nullopt;
}

Requirement default_requirement(const TimePowerMapping& reply) {
    return reply.size() > 1 ? Requirement::Prefix : Requirement::AllOrNothing;
}

std::size_t AtomGrid::power_atom_count() const {
    if (mode == AtomMode::Gcd) {
        return delta_p > 0 ? static_cast<std::size_t>(max_power / delta_p) : 0;
    }
    return power_intervals.size();
}

std::string AtomGrid::describe_partition() const {
    std::ostringstream os;
    if (mode == AtomMode::Gcd) {
        os << "delta_p=" << delta_p << " delta_t=" << delta_t;
        return os.str();
    }
    for (std::size_t i = 0; i < power_intervals.size(); ++i) {
        os << (i ? " " : "") << '[' << power_intervals[i].low << ';' << power_intervals[i].high << ']';
    }
    return os.str();
}

AtomExplosion::AtomExplosion(std::size_t atoms_, std::size_t variables_, std::size_t bound_)
    : Error("atom explosion: " + std::to_string(variables_) + " variables exceed bound " +
            std::to_string(bound_)),
      atoms(atoms_), variables(variables_), bound(bound_) {}

namespace {

void check_replies(std::span<const Reply> replies) {
    std::set<AgentId> seen;
    for (const auto& r : replies) {
        if (!seen.insert(r.agent).second) {
            throw Error("duplicate reply from agent " + std::to_string(r.agent));
        }
    }
}

std::vector<TimePowerMapping> clipped_mappings(const TimePowerMapping& demand, std::span<const Reply> replies) {
    std::vector<TimePowerMapping> all;
    if (demand.empty()) {
        return all;
    }
    all.push_back(demand);
    const TimeInterval window = demand.span();
    for (const auto& r : replies) {
        all.push_back(r.mapping.clipped(window));
    }
    return all;
}

// Index of the time subinterval containing t. Subintervals are sorted and contiguous.
std::size_t slice_of(const std::vector<TimeInterval>& slices, Seconds t) {
    auto it = std::upper_bound(slices.begin(), slices.end(), t,
                               [](Seconds x, const TimeInterval& s) { return x < s.start; });
    return static_cast<std::size_t>(std::distance(slices.begin(), it)) - 1;
}

}  // namespace

AtomGrid atomize_gcd(const TimePowerMapping& demand, std::span<const Reply> replies, std::size_t bound) {
    check_replies(replies);
    AtomGrid grid;
    grid.mode = AtomMode::Gcd;
    for (const auto& r : replies) {
        grid.agents.push_back(r.agent);
    }
    const auto all = clipped_mappings(demand, replies);
    if (all.empty()) {
        return grid;
    }
    const TimeInterval window = demand.span();

    // Slices must also align with every breakpoint, not only divide durations.
    Seconds dt = duration_gcd(all);
    for (const auto& m : all) {
        for (const auto& e : m.entries()) {
            dt = std::gcd(dt, e.interval.start - window.start);
        }
    }
    grid.delta_t = dt;
    grid.delta_p = power_gcd(all);
    for (const auto& m : all) {
        grid.max_power = std::max(grid.max_power, m.max_magnitude());
    }
    std::size_t count = 0;
    for (std::size_t r = 1; r < all.size(); ++r) {
        for (const auto& e : all[r].entries()) {
            count += static_cast<std::size_t>(e.interval.duration() / dt) *
                     static_cast<std::size_t>(e.power.magnitude / grid.delta_p);
        }
    }
    if (count > bound) {
        throw AtomExplosion(grid.power_atom_count(), count, bound);
    }

    for (Seconds t = window.start; t < window.end; t += dt) {
        grid.time_subintervals.push_back({t, t + dt});
    }

    for (std::size_t r = 1; r < all.size(); ++r) {
        for (const auto& e : all[r].entries()) {
            const std::size_t atoms = static_cast<std::size_t>(e.power.magnitude / grid.delta_p);
            for (Seconds t = e.interval.start; t < e.interval.end; t += dt) {
                const std::size_t s = slice_of(grid.time_subintervals, t);
                for (std::size_t a = 0; a < atoms; ++a) {
                    grid.vars.push_back(AtomVar{r - 1, s, a});
                }
            }
        }
    }
    return grid;
}

AtomGrid atomize_intervals(const TimePowerMapping& demand, std::span<const Reply> replies) {
    check_replies(replies);
    AtomGrid grid;
    grid.mode = AtomMode::Intervals;
    for (const auto& r : replies) {
        grid.agents.push_back(r.agent);
    }
    const auto all = clipped_mappings(demand, replies);
    if (all.empty()) {
        return grid;
    }
    const TimeInterval window = demand.span();

    std::set<Watts> magnitudes;
    std::set<Seconds> cuts{window.start, window.end};
    for (const auto& m : all) {
        for (const auto& e : m.entries()) {
            magnitudes.insert(e.power.magnitude);
            cuts.insert(e.interval.start);
            cuts.insert(e.interval.end);
        }
    }
    Watts low = 0;
    for (Watts m : magnitudes) {
        grid.power_intervals.push_back({low, m});
        low = m + 1;
    }
    grid.max_power = *magnitudes.rbegin();
    const std::vector<Seconds> c(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        grid.time_subintervals.push_back({c[i], c[i + 1]});
    }

    for (std::size_t r = 1; r < all.size(); ++r) {
        for (const auto& e : all[r].entries()) {
            const auto p = static_cast<std::size_t>(
                std::distance(magnitudes.begin(), magnitudes.find(e.power.magnitude)));
            for (std::size_t s = slice_of(grid.time_subintervals, e.interval.start);
                 s < grid.time_subintervals.size() && grid.time_subintervals[s].start < e.interval.end; ++s) {
                grid.vars.push_back(AtomVar{r - 1, s, p});
            }
        }
    }
    return grid;
}

}  // namespace lpep::solver
