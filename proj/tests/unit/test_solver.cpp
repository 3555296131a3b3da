#include "lpep/solver.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

using namespace lpep;
using namespace lpep::solver;

namespace {

constexpr TimeInterval hour{0, 3600};

TimePowerMapping demand_of(Watts w) {
    return w == 0 ? TimePowerMapping{} : TimePowerMapping::single(hour, w, Direction::Demand);
}

std::vector<Reply> offers(std::initializer_list<Watts> ws) {
    std::vector<Reply> out;
    AgentId id = 1;
    for (Watts w : ws) {
        out.push_back(Reply{id++, TimePowerMapping::single(hour, w, Direction::Supply), std::nullopt});
    }
    return out;
}

// Schedule with one entry per nonzero slot of `slot` seconds.
TimePowerMapping slots(std::initializer_list<Watts> ws, Direction d, Seconds slot = 900) {
    std::vector<MappingEntry> es;
    Seconds t = 0;
    for (Watts w : ws) {
        if (w > 0) {
            es.push_back(MappingEntry{{t, t + slot}, PowerQuantum{w, d}});
        }
        t += slot;
    }
    return TimePowerMapping(std::move(es));
}

std::vector<AgentId> agents(const Solution& s) {
    return s.accepted_agents();
}

}  // namespace

TEST_CASE("gcd atomization") {
    SUBCASE("5, 51, 150 on one subinterval gives 150 power atoms") {
        const auto grid = atomize_gcd(demand_of(150), offers({5, 51, 150}), 1000);
        CHECK(grid.delta_p == 1);
        CHECK(grid.power_atom_count() == 150);
        CHECK(grid.width() == 5 + 51 + 150);
        try {
            atomize_gcd(demand_of(150), offers({5, 51, 150}));
            FAIL("expected an atom explosion");
        } catch (const AtomExplosion& e) {
            CHECK(e.atoms == 150);
            CHECK(e.variables == 206);
        }
    }
    SUBCASE("equal offer and demand give one atom") {
        const auto grid = atomize_gcd(demand_of(100), offers({100}));
        CHECK(grid.delta_p == 100);
        CHECK(grid.width() == 1);
    }
    SUBCASE("offers 4 and 6 against 10") {
        const auto grid = atomize_gcd(demand_of(10), offers({4, 6}));
        CHECK(grid.delta_p == 2);
        CHECK(grid.delta_t == 3600);
        std::size_t first = 0, second = 0;
        for (const auto& v : grid.vars) {
            (v.reply == 0 ? first : second) += 1;
        }
        CHECK(first == 2);
        CHECK(second == 3);
    }
    SUBCASE("slices align with breakpoints") {
        const auto d = TimePowerMapping::single({0, 900}, 4, Direction::Demand);
        const std::vector<Reply> r{{1, TimePowerMapping::single({300, 900}, 4, Direction::Supply), std::nullopt}};
        const auto grid = atomize_gcd(d, r);
        CHECK(grid.delta_t == 300);
        CHECK(grid.time_subintervals.size() == 3);
    }
}

TEST_CASE("interval atomization") {
    SUBCASE("5, 51, 150") {
        const auto grid = atomize_intervals(demand_of(150), offers({5, 51, 150}));
        CHECK(grid.power_atom_count() == 3);
        CHECK(grid.power_intervals == std::vector<PowerRange>{{0, 5}, {6, 51}, {52, 150}});
        CHECK(grid.describe_partition() == "[0;5] [6;51] [52;150]");
        CHECK(grid.width() == 3);
    }
    SUBCASE("single magnitude") {
        const auto grid = atomize_intervals(demand_of(7), offers({7}));
        CHECK(grid.power_intervals == std::vector<PowerRange>{{0, 7}});
    }
    SUBCASE("repeated magnitudes collapse") {
        const auto grid = atomize_intervals(demand_of(9), offers({4, 4}));
        CHECK(grid.power_intervals == std::vector<PowerRange>{{0, 4}, {5, 9}});
        CHECK(grid.power_atom_count() == 2);
    }
}

TEST_CASE("cover construction") {
    SUBCASE("demand 10 against 4, 6, 5 has one cover") {
        const auto cp = build_cover(demand_of(10), offers({4, 6, 5}), AtomMode::Intervals);
        const auto sols = tvl::solutions(cover_function(cp));
        REQUIRE(sols.size() == 1);
        CHECK(sols[0].to_string() == "110");
    }
    SUBCASE("demand 5 against a single 5") {
        const auto cp = build_cover(demand_of(5), offers({5}), AtomMode::Gcd);
        CHECK(tvl::solutions(cover_function(cp)).size() == 1);
    }
    SUBCASE("prefix reply over three subintervals") {
        const auto d = slots({3, 2, 4}, Direction::Demand);
        const std::vector<Reply> r{{1, slots({3, 2, 4}, Direction::Supply), Requirement::Prefix}};
        const auto cp = build_cover(d, r, AtomMode::Intervals);
        CHECK(cp.requirements.size() == 1);
        CHECK(cp.requirements[0].groups.size() == 3);
        // Exact thresholds leave only the full prefix; "at most" admits all four.
        CHECK(tvl::solutions(cover_function(cp)).size() == 1);
        CHECK(tvl::solutions(cover_function(cp, true)).size() == 4);
    }
}

TEST_CASE("exact solving") {
    const auto r = offers({4, 6, 5});
    const auto s = solve_exact(build_cover(demand_of(10), r, AtomMode::Gcd));
    REQUIRE(s);
    CHECK(agents(*s) == std::vector<AgentId>{1, 2});
    CHECK(s->exact);

    CHECK_FALSE(solve_exact(build_cover(demand_of(3), offers({2}), AtomMode::Gcd)));

    const auto zero = solve_exact(build_cover(demand_of(0), offers({2}), AtomMode::Gcd));
    REQUIRE(zero);
    CHECK(zero->accepted.empty());
    CHECK(zero->exact);
}

TEST_CASE("best-effort solving") {
    const auto a = solve_best_effort(build_cover(demand_of(10), offers({4, 5}), AtomMode::Gcd));
    CHECK(agents(a) == std::vector<AgentId>{1, 2});
    CHECK(a.matched_power == std::vector<Watts>{9});
    CHECK_FALSE(a.exact);

    const auto b = solve_best_effort(build_cover(demand_of(10), offers({4, 6}), AtomMode::Gcd));
    CHECK(b.matched_power == std::vector<Watts>{10});
    CHECK(b.exact);

    const auto c = solve_best_effort(build_cover(demand_of(10), offers({12}), AtomMode::Gcd));
    CHECK(c.accepted.empty());
    CHECK(c.matched_power == std::vector<Watts>{0});
}

TEST_CASE("selection prefers energy, then fewer agents, then smaller ids") {
    const auto fewer = solve_exact(build_cover(demand_of(10), offers({4, 6, 10}), AtomMode::Intervals));
    REQUIRE(fewer);
    CHECK(agents(*fewer) == std::vector<AgentId>{3});

    const auto smaller = solve_exact(build_cover(demand_of(5), offers({5, 5}), AtomMode::Gcd));
    REQUIRE(smaller);
    CHECK(agents(*smaller) == std::vector<AgentId>{1});

    const auto more = solve_best_effort(build_cover(demand_of(10), offers({9, 10}), AtomMode::Intervals));
    CHECK(agents(more) == std::vector<AgentId>{2});

    CHECK_THROWS(select_solution({}, build_cover(demand_of(5), offers({5}), AtomMode::Gcd)));
}

TEST_CASE("accepted mappings follow prefix levels") {
    const auto d = slots({5, 5, 5}, Direction::Demand);
    const std::vector<Reply> r{{7, slots({5, 5, 9}, Direction::Supply), std::nullopt}};
    const auto s = solve_best_effort(build_cover(d, r, AtomMode::Intervals));
    REQUIRE(s.accepted.size() == 1);
    CHECK(s.accepted[0].second == slots({5, 5}, Direction::Supply));
    CHECK(s.matched_power == std::vector<Watts>{5, 5, 0});
}

TEST_CASE("auto mode falls back to intervals on explosion") {
    const auto r = resolve(demand_of(150), offers({5, 51, 150}), SolverMode::Auto);
    CHECK(r.mode == AtomMode::Intervals);
    CHECK(r.atom_count == 3);
    CHECK(agents(r.solution) == std::vector<AgentId>{3});
    CHECK_THROWS_AS(resolve(demand_of(150), offers({5, 51, 150}), SolverMode::Gcd), AtomExplosion);
}

TEST_CASE("random instances agree with enumeration, in both atomizations") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 400; ++i) {
        const std::size_t n_slots = 1 + rng() % 3;
        std::vector<MappingEntry> de;
        for (std::size_t s = 0; s < n_slots; ++s) {
            const Watts w = static_cast<Watts>(rng() % 5);
            if (w > 0) {
                de.push_back(MappingEntry{{static_cast<Seconds>(s) * 60, static_cast<Seconds>(s + 1) * 60},
                                          PowerQuantum{w, Direction::Demand}});
            }
        }
        const TimePowerMapping demand(de);
        std::vector<oracle::Reply> replies;
        const std::size_t n_agents = 1 + rng() % 3;
        for (AgentId a = 1; a <= n_agents; ++a) {
            std::vector<MappingEntry> es;
            for (std::size_t s = 0; s < n_slots; ++s) {
                const Watts w = static_cast<Watts>(rng() % 4);
                if (w > 0) {
                    es.push_back(MappingEntry{{static_cast<Seconds>(s) * 60, static_cast<Seconds>(s + 1) * 60},
                                              PowerQuantum{w, Direction::Supply}});
                }
            }
            if (es.empty()) {
                continue;
            }
            const auto req = rng() % 2 ? Requirement::Prefix : Requirement::AllOrNothing;
            replies.push_back(oracle::Reply{a, TimePowerMapping(es), req});
        }
        const auto verdict = oracle::brute_force(demand, replies);
        const auto sr = oracle::to_solver(replies);
        for (auto mode : {AtomMode::Gcd, AtomMode::Intervals}) {
            CoverProblem cp;
            try {
                cp = build_cover(demand, sr, mode);
            } catch (const AtomExplosion&) {
                continue;
            }
            const auto exact = solve_exact(cp);
            CHECK(exact.has_value() == verdict.exact_exists);
            if (exact) {
                CHECK(agents(*exact) == verdict.exact_agents);
            }
            const auto best = solve_best_effort(cp);
            CHECK(best.matched_energy(cp.grid) == verdict.best_energy);
            for (std::size_t s = 0; s < best.matched_power.size(); ++s) {
                CHECK(best.matched_power[s] <= cp.target[s]);
            }
            // Any single all-or-nothing reply that fits is dominated.
            for (const auto& r : replies) {
                const auto clipped = demand.empty() ? TimePowerMapping{} : r.mapping.clipped(demand.span());
                if (dominates(demand, clipped.with_direction(Direction::Demand))) {
                    CHECK(best.matched_energy(cp.grid) >= clipped.energy());
                }
            }
        }
    }
}
