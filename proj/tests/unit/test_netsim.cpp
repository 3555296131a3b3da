#include "lpep/netsim.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <sstream>

using namespace lpep;
using namespace lpep::netsim;

namespace {

IctNode agent(AgentId id) {
    return {IctNode::Kind::Agent, id};
}

IctNode ap(std::uint32_t i) {
    return {IctNode::Kind::AccessPoint, i};
}

// Line 1-2-3 on the grid, all three agents behind one access point.
Scenario line(Micros link_delay) {
    Scenario s;
    s.grid.nodes = {1, 2, 3};
    s.grid.edges = {{1, 2, 0.1}, {2, 3, 0.2}};
    s.ict.agents = {1, 2, 3};
    s.ict.access_points = {"ap"};
    for (AgentId a : {1u, 2u, 3u}) {
        s.ict.links.push_back({agent(a), ap(0), link_delay});
    }
    s.agents = {{1, {}},
                {2, {TimePowerMapping::single({0, 900}, 4, Direction::Supply), {}}},
                {3, {TimePowerMapping::single({0, 900}, 6, Direction::Supply), {}}}};
    s.disequilibria = {{1, 0, TimePowerMapping::single({0, 900}, 10, Direction::Demand), Direction::Demand}};
    return s;
}

}  // namespace

TEST_CASE("grid validation") {
    GridTopology g{{1, 2, 3}, {{1, 2, 0.1}, {2, 3, 0.1}}};
    CHECK_NOTHROW(g.validate());
    CHECK(g.hop_diameter() == 2);
    const auto n = g.neighbors(2);
    REQUIRE(n.size() == 2);
    CHECK(n[0].id == 1);
    CHECK(n[1].id == 3);

    auto disconnected = g;
    disconnected.nodes.push_back(4);
    CHECK_THROWS_AS(disconnected.validate(), ConfigError);
    auto loop = g;
    loop.edges.push_back({3, 3, 0.1});
    CHECK_THROWS_AS(loop.validate(), ConfigError);
    auto zero = g;
    zero.edges[0].impedance_ohm = 0;
    CHECK_THROWS_AS(zero.validate(), ConfigError);
    auto twice = g;
    twice.edges.push_back({2, 1, 0.3});
    CHECK_THROWS_AS(twice.validate(), ConfigError);
    auto dangling = g;
    dangling.edges.push_back({3, 9, 0.1});
    CHECK_THROWS_AS(dangling.validate(), ConfigError);
}

TEST_CASE("rng stays within bounds and repeats per seed") {
    Rng a(42), b(42);
    for (int i = 0; i < 5000; ++i) {
        const auto x = a.uniform(10, 17);
        CHECK(x >= 10);
        CHECK(x <= 17);
        CHECK(x == b.uniform(10, 17));
    }
    Rng c(1);
    CHECK(c.uniform(5, 5) == 5);
}

TEST_CASE("link delay sampling") {
    IctTopology ict;
    ict.agents = {1, 2};
    ict.access_points = {"ap"};
    ict.links = {{agent(1), ap(0), std::nullopt}, {agent(2), ap(0), 7}};
    ict.bounds = {1000, 2000};
    const auto x = sample_link_delays(ict, 3);
    const auto y = sample_link_delays(ict, 3);
    REQUIRE(x.links[0].delay);
    CHECK(*x.links[0].delay >= 1000);
    CHECK(*x.links[0].delay <= 2000);
    CHECK(x.links[0].delay == y.links[0].delay);
    CHECK(*x.links[1].delay == 7);

    ict.bounds = {0, 10};
    CHECK_THROWS_AS(sample_link_delays(ict, 1), ConfigError);
}

TEST_CASE("delay matrix follows fastest paths") {
    IctTopology ict;
    ict.agents = {1, 2, 3};
    ict.access_points = {"a", "b"};
    ict.links = {{agent(1), ap(0), 10}, {agent(2), ap(0), 20}, {agent(3), ap(1), 5},
                 {ap(0), ap(1), 100}, {agent(1), agent(3), 30}};
    const auto d = delay_matrix(ict);
    CHECK(d(1, 1) == 0);
    CHECK(d(1, 2) == 30);
    CHECK(d(1, 3) == 30);
    CHECK(d(2, 3) == 60);
    CHECK(d(3, 2) == 60);
    CHECK(d.max() == 60);
    CHECK_THROWS_AS(d(1, 9), ConfigError);

    ict.links.pop_back();
    ict.links.pop_back();
    CHECK_THROWS_AS(delay_matrix(ict), ConfigError);

    GridTopology g{{1, 2, 3}, {{1, 2, 0.1}, {1, 3, 0.1}}};
    const auto full = delay_matrix(IctTopology{{1, 2, 3}, {"a"}, {{agent(1), ap(0), 10}, {agent(2), ap(0), 20}, {agent(3), ap(0), 40}}, {}});
    // Overlay 2-1-3: 30 + 50.
    CHECK(overlay_delay_diameter(g, full) == 80);
}

TEST_CASE("effective timer") {
    auto s = line(1000);
    const auto d = delay_matrix(s.ict);
    CHECK(effective_timer(s, d) == 20'000);
    s.protocol.timer_diameter_factor = 20.0;
    // Each grid edge crosses the access point: 2000 us, so the diameter is 4000 us.
    CHECK(effective_timer(s, d) == 80'000);
}

TEST_CASE("simulated negotiation on a line") {
    const auto s = line(1000);
    const auto r = run(s, 1);
    REQUIRE(r.outcomes.size() == 1);
    const auto& o = r.outcomes[0];
    CHECK(o.exact);
    CHECK(o.confirmed == TimePowerMapping::single({0, 900}, 10, Direction::Demand));
    CHECK(oracle::check_trace(r.trace, oracle::limits_of(r)).empty());
    // Agent pairs are 2 ms apart. Offers arrive at 4 ms (agent 2) and 8 ms
    // (agent 3 via relay); the cover closes collection at 8 ms and the acks
    // are back 4 ms later.
    CHECK(o.closed_at == 12'000);
    CHECK(o.closed_at - o.opened_at <= r.timer + 2 * r.delays.max());

    CHECK(run(s, 1).trace == r.trace);

    const auto z = run(s, 1, RunOptions{true, std::nullopt, 0});
    REQUIRE(z.outcomes.size() == 1);
    CHECK(z.outcomes[0].closed_at == z.outcomes[0].opened_at);
    CHECK(z.outcomes[0].confirmed == o.confirmed);
}

TEST_CASE("shortfall closes at the timer") {
    auto s = line(1000);
    s.agents[2].capacity.supply = TimePowerMapping::single({0, 900}, 3, Direction::Supply);
    const auto r = run(s, 1);
    REQUIRE(r.outcomes.size() == 1);
    CHECK_FALSE(r.outcomes[0].exact);
    CHECK(r.outcomes[0].confirmed == TimePowerMapping::single({0, 900}, 7, Direction::Demand));
    CHECK(r.outcomes[0].closed_at == 20'000 + 4000);
    CHECK(oracle::check_trace(r.trace, oracle::limits_of(r)).empty());
}

TEST_CASE("event cap") {
    auto s = line(1000);
    s.run.event_cap = 3;
    try {
        run(s, 1);
        FAIL("expected runaway");
    } catch (const RunawaySimulation& e) {
        CHECK(e.prefix.records.size() > 0);
    }
}

TEST_CASE("scenario validation") {
    auto s = line(1000);
    CHECK_NOTHROW(s.validate());
    auto unknown = s;
    unknown.disequilibria[0].agent = 9;
    CHECK_THROWS_AS(unknown.validate(), ConfigError);
    auto late = s;
    late.disequilibria[0].trigger = late.run.time_limit + 1;
    CHECK_THROWS_AS(late.validate(), ConfigError);
    auto mismatch = s;
    mismatch.ict.agents = {1, 2};
    CHECK_THROWS_AS(mismatch.validate(), ConfigError);
}

TEST_CASE("traces round trip through json lines") {
    const auto r = run(line(1000), 4);
    std::stringstream ss;
    write_trace(ss, r.trace);
    const auto back = read_traces(ss);
    REQUIRE(back.size() == 1);
    std::stringstream again;
    write_trace(again, back[0]);
    std::stringstream first;
    write_trace(first, r.trace);
    CHECK(again.str() == first.str());
    CHECK(back[0].records.size() == r.trace.records.size());
}
