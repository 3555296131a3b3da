#include "lpep/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

namespace lpep::netsim {

namespace {

constexpr Micros unreachable = std::numeric_limits<Micros>::max();

// Single-source shortest paths over a dense adjacency list.
std::vector<Micros> dijkstra(const std::vector<std::vector<std::pair<std::size_t, Micros>>>& adj, std::size_t source) {
    std::vector<Micros> dist(adj.size(), unreachable);
    using Item = std::pair<Micros, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0;
    queue.push({0, source});
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) {
            continue;
        }
        for (const auto& [v, w] : adj[u]) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                queue.push({dist[v], v});
            }
        }
    }
    return dist;
}

std::size_t position(const std::vector<AgentId>& ids, AgentId id) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) {
        throw ConfigError("unknown agent " + std::to_string(id));
    }
    return static_cast<std::size_t>(it - ids.begin());
}

}  // namespace

void GridTopology::validate() const {
    std::set<AgentId> ids(nodes.begin(), nodes.end());
    if (ids.size() != nodes.size()) {
        throw ConfigError("duplicate grid node");
    }
    if (nodes.empty()) {
        throw ConfigError("grid has no nodes");
    }
    std::set<std::pair<AgentId, AgentId>> seen;
    for (const auto& e : edges) {
        if (e.a == e.b) {
            throw ConfigError("self-loop at grid node " + std::to_string(e.a));
        }
        if (!ids.contains(e.a) || !ids.contains(e.b)) {
            throw ConfigError("grid edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                              " references an unknown node");
        }
        if (!(e.impedance_ohm > 0.0)) {
            throw ConfigError("grid edge " + std::to_string(e.a) + "-" + std::to_string(e.b) +
                              " needs a positive impedance");
        }
        if (!seen.insert(std::minmax(e.a, e.b)).second) {
            throw ConfigError("duplicate grid edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
        }
    }
    // Connectivity by flood fill from the first node.
    std::set<AgentId> reached{nodes.front()};
    std::vector<AgentId> stack{nodes.front()};
    while (!stack.empty()) {
        const AgentId u = stack.back();
        stack.pop_back();
        for (const auto& nb : neighbors(u)) {
            if (reached.insert(nb.id).second) {
                stack.push_back(nb.id);
            }
        }
    }
    for (AgentId id : nodes) {
        if (!reached.contains(id)) {
            throw ConfigError("grid is disconnected: node " + std::to_string(id) + " unreachable from " +
                              std::to_string(nodes.front()));
        }
    }
}

std::vector<protocol::Neighbor> GridTopology::neighbors(AgentId id) const {
    std::vector<protocol::Neighbor> out;
    for (const auto& e : edges) {
        if (e.a == id) {
            out.push_back({e.b, e.impedance_ohm});
        } else if (e.b == id) {
            out.push_back({e.a, e.impedance_ohm});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
    return out;
}

std::size_t GridTopology::hop_diameter() const {
    std::vector<std::vector<std::pair<std::size_t, Micros>>> adj(nodes.size());
    for (const auto& e : edges) {
        const auto a = position(nodes, e.a);
        const auto b = position(nodes, e.b);
        adj[a].push_back({b, 1});
        adj[b].push_back({a, 1});
    }
    Micros best = 0;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
        for (Micros d : dijkstra(adj, s)) {
            if (d != unreachable) {
                best = std::max(best, d);
            }
        }
    }
    return static_cast<std::size_t>(best);
}

std::string IctTopology::name(const IctNode& n) const {
    if (n.kind == IctNode::Kind::Agent) {
        return std::to_string(n.id);
    }
    return n.id < access_points.size() ? access_points[n.id] : "ap#" + std::to_string(n.id);
}

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) {
        return static_cast<std::int64_t>(engine_());
    }
    const std::uint64_t limit = (std::numeric_limits<std::uint64_t>::max() / range) * range;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
}

IctTopology sample_link_delays(IctTopology ict, std::uint64_t seed) {
    const bool needs_sampling =
        std::any_of(ict.links.begin(), ict.links.end(), [](const IctLink& l) { return !l.delay; });
    if (needs_sampling) {
        if (ict.bounds.min <= 0 || ict.bounds.min > ict.bounds.max) {
            throw ConfigError("delay bounds must satisfy 0 < d_min <= d_max");
        }
    }
    Rng rng(seed);
    for (auto& link : ict.links) {
        if (!link.delay) {
            link.delay = rng.uniform(ict.bounds.min, ict.bounds.max);
        }
    }
    return ict;
}

DelayMatrix::DelayMatrix(std::vector<AgentId> agents, std::vector<Micros> delays)
    : agents_(std::move(agents)), delays_(std::move(delays)) {}

DelayMatrix DelayMatrix::zero(std::vector<AgentId> agents) {
    const std::size_t n = agents.size();
    return DelayMatrix(std::move(agents), std::vector<Micros>(n * n, 0));
}

std::size_t DelayMatrix::index(AgentId a) const {
    return position(agents_, a);
}

Micros DelayMatrix::operator()(AgentId from, AgentId to) const {
    return delays_[index(from) * agents_.size() + index(to)];
}

Micros DelayMatrix::max() const {
    Micros m = 0;
    for (Micros d : delays_) {
        m = std::max(m, d);
    }
    return m;
}

DelayMatrix delay_matrix(const IctTopology& ict) {
    const std::size_t n_agents = ict.agents.size();
    const std::size_t n = n_agents + ict.access_points.size();
    auto node_index = [&](const IctNode& node) -> std::size_t {
        if (node.kind == IctNode::Kind::Agent) {
            return position(ict.agents, node.id);
        }
        if (node.id >= ict.access_points.size()) {
            throw ConfigError("unknown access point " + ict.name(node));
        }
        return n_agents + node.id;
    };
    std::vector<std::vector<std::pair<std::size_t, Micros>>> adj(n);
    for (const auto& link : ict.links) {
        if (!link.delay) {
            throw ConfigError("link " + ict.name(link.a) + "-" + ict.name(link.b) + " has no delay");
        }
        if (*link.delay < 0) {
            throw ConfigError("link " + ict.name(link.a) + "-" + ict.name(link.b) + " has a negative delay");
        }
        const auto a = node_index(link.a);
        const auto b = node_index(link.b);
        adj[a].push_back({b, *link.delay});
        adj[b].push_back({a, *link.delay});
    }
    std::vector<Micros> delays(n_agents * n_agents, 0);
    for (std::size_t i = 0; i < n_agents; ++i) {
        const auto dist = dijkstra(adj, i);
        for (std::size_t j = 0; j < n_agents; ++j) {
            if (dist[j] == unreachable) {
                throw ConfigError("agents " + std::to_string(ict.agents[i]) + " and " +
                                  std::to_string(ict.agents[j]) + " are disconnected in the ICT topology");
            }
            delays[i * n_agents + j] = dist[j];
        }
    }
    return DelayMatrix(ict.agents, std::move(delays));
}

Micros overlay_delay_diameter(const GridTopology& grid, const DelayMatrix& delays) {
    std::vector<std::vector<std::pair<std::size_t, Micros>>> adj(grid.nodes.size());
    for (const auto& e : grid.edges) {
        const auto a = position(grid.nodes, e.a);
        const auto b = position(grid.nodes, e.b);
        adj[a].push_back({b, delays(e.a, e.b)});
        adj[b].push_back({a, delays(e.b, e.a)});
    }
    Micros best = 0;
    for (std::size_t s = 0; s < grid.nodes.size(); ++s) {
        for (Micros d : dijkstra(adj, s)) {
            if (d != unreachable) {
                best = std::max(best, d);
            }
        }
    }
    return best;
}

void Scenario::validate() const {
    grid.validate();
    const std::set<AgentId> grid_ids(grid.nodes.begin(), grid.nodes.end());
    const std::set<AgentId> ict_ids(ict.agents.begin(), ict.agents.end());
    for (AgentId id : grid.nodes) {
        if (!ict_ids.contains(id)) {
            throw ConfigError("agent " + std::to_string(id) + " missing from the ICT topology");
        }
    }
    for (AgentId id : ict.agents) {
        if (!grid_ids.contains(id)) {
            throw ConfigError("dangling agent id " + std::to_string(id) + " in the ICT topology");
        }
    }
    std::set<AgentId> specified;
    for (const auto& a : agents) {
        if (!grid_ids.contains(a.id)) {
            throw ConfigError("dangling agent id " + std::to_string(a.id));
        }
        if (!specified.insert(a.id).second) {
            throw ConfigError("agent " + std::to_string(a.id) + " specified twice");
        }
    }
    for (const auto& d : disequilibria) {
        if (!grid_ids.contains(d.agent)) {
            throw ConfigError("dangling agent id " + std::to_string(d.agent) + " in disequilibrium");
        }
        if (d.trigger < 0 || d.trigger > run.time_limit) {
            throw ConfigError("trigger time outside the simulation window for agent " + std::to_string(d.agent));
        }
    }
    for (const auto& link : ict.links) {
        for (const auto& end : {link.a, link.b}) {
            if (end.kind == IctNode::Kind::Agent && !ict_ids.contains(end.id)) {
                throw ConfigError("dangling agent id " + std::to_string(end.id) + " in ICT link");
            }
            if (end.kind == IctNode::Kind::AccessPoint && end.id >= ict.access_points.size()) {
                throw ConfigError("unknown access point in ICT link");
            }
        }
        if (link.delay && *link.delay <= 0) {
            throw ConfigError("link " + ict.name(link.a) + "-" + ict.name(link.b) + " needs a positive delay");
        }
    }
    if (protocol.timer <= 0) {
        throw ConfigError("timer must be positive");
    }
    if (protocol.timer_diameter_factor && !(*protocol.timer_diameter_factor > 0.0)) {
        throw ConfigError("timer_diameter_factor must be positive");
    }
}

}  // namespace lpep::netsim
