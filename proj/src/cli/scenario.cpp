#include "lpep/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace lpep::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> words(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(s.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

template <typename T>
std::optional<T> to_integer(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        return std::nullopt;
    }
    return v;
}

template <typename T>
T integer(std::string_view s, const std::string& what) {
    if (auto v = to_integer<T>(s)) {
        return *v;
    }
    throw netsim::ConfigError("non-integer " + what + " '" + std::string(s) + "'");
}

double decimal(std::string_view s, const std::string& what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw netsim::ConfigError("invalid " + what + " '" + std::string(s) + "'");
    }
    return v;
}

AgentId agent_id(std::string_view s) {
    return integer<AgentId>(s, "agent id");
}

struct Line {
    std::size_t number = 0;
    std::string key;
    std::string value;
};

constexpr const char* known_sections[] = {"grid", "ict", "agents", "protocol", "run"};

class Parser {
public:
    explicit Parser(std::string name) : name_(std::move(name)) {}

    netsim::Scenario parse(std::istream& in) {
        read(in);
        for (const char* required : {"grid", "ict"}) {
            if (!sections_.contains(required)) {
                throw ScenarioError(name_ + ": missing section: " + required);
            }
        }
        grid();
        ict();
        run();
        protocol();
        agents();
        try {
            scenario_.validate();
        } catch (const netsim::ConfigError& e) {
            throw ScenarioError(name_ + ": " + e.what());
        }
        return std::move(scenario_);
    }

private:
    void read(std::istream& in) {
        std::string raw;
        std::size_t number = 0;
        std::string section;
        while (std::getline(in, raw)) {
            ++number;
            std::string_view line = raw;
            if (auto hash = line.find('#'); hash != std::string_view::npos) {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty()) {
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']') {
                    fail(number, "malformed section header");
                }
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (std::find(std::begin(known_sections), std::end(known_sections), section) ==
                    std::end(known_sections)) {
                    fail(number, "unknown section [" + section + "]");
                }
                if (sections_.contains(section)) {
                    fail(number, "section [" + section + "] appears twice");
                }
                sections_[section];
                continue;
            }
            if (section.empty()) {
                fail(number, "key outside any section");
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                fail(number, "expected 'key = value'");
            }
            sections_[section].push_back(
                Line{number, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))});
        }
    }

    [[noreturn]] void fail(std::size_t line, const std::string& message) const {
        throw ScenarioError(name_ + ":" + std::to_string(line) + ": " + message);
    }

    // Runs `body` for each line of a section, attaching the line number to errors.
    template <typename F>
    void each(const std::string& section, const std::set<std::string>& keys, F body) {
        for (const auto& line : sections_[section]) {
            if (!keys.contains(line.key)) {
                fail(line.number, "unknown key '" + line.key + "' in [" + section + "]");
            }
            try {
                body(line);
            } catch (const ScenarioError&) {
                throw;
            } catch (const Error& e) {
                fail(line.number, e.what());
            }
        }
    }

    void single(const Line& line, std::set<std::string>& seen) {
        if (!seen.insert(line.key).second) {
            fail(line.number, "key '" + line.key + "' given twice");
        }
    }

    void grid() {
        std::set<std::string> seen;
        std::optional<std::size_t> nodes_line;
        each("grid", {"agents", "edge"}, [&](const Line& line) {
            if (line.key == "agents") {
                single(line, seen);
                nodes_line = line.number;
                for (auto w : words(line.value)) {
                    scenario_.grid.nodes.push_back(agent_id(w));
                }
                return;
            }
            const auto w = words(line.value);
            if (w.size() != 3) {
                throw Error("edge needs '<agent> <agent> <impedance_ohm>'");
            }
            scenario_.grid.edges.push_back(
                netsim::GridEdge{agent_id(w[0]), agent_id(w[1]), decimal(w[2], "impedance")});
        });
        if (!nodes_line) {
            throw ScenarioError(name_ + ": [grid] needs an 'agents' key");
        }
        grid_ids_.insert(scenario_.grid.nodes.begin(), scenario_.grid.nodes.end());
        for (const auto& line : sections_["grid"]) {
            if (line.key != "edge") {
                continue;
            }
            const auto w = words(line.value);
            for (std::size_t i = 0; i < 2; ++i) {
                if (!grid_ids_.contains(agent_id(w[i]))) {
                    fail(line.number, "dangling agent id " + std::string(w[i]));
                }
            }
        }
        try {
            scenario_.grid.validate();
        } catch (const netsim::ConfigError& e) {
            fail(*nodes_line, e.what());
        }
    }

    netsim::IctNode node(std::string_view w) {
        if (auto id = to_integer<AgentId>(w)) {
            if (!grid_ids_.contains(*id)) {
                throw netsim::ConfigError("dangling agent id " + std::string(w));
            }
            return {netsim::IctNode::Kind::Agent, *id};
        }
        const auto& aps = scenario_.ict.access_points;
        auto it = std::find(aps.begin(), aps.end(), w);
        if (it == aps.end()) {
            throw netsim::ConfigError("unknown access point '" + std::string(w) + "'");
        }
        return {netsim::IctNode::Kind::AccessPoint, static_cast<std::uint32_t>(it - aps.begin())};
    }

    void ict() {
        auto& ict = scenario_.ict;
        ict.agents = scenario_.grid.nodes;
        std::set<std::string> seen;
        // Access points are declared before links may name them, wherever the line sits.
        for (const auto& line : sections_["ict"]) {
            if (line.key == "access_points") {
                single(line, seen);
                for (auto w : words(line.value)) {
                    if (to_integer<AgentId>(w)) {
                        fail(line.number, "access point name '" + std::string(w) + "' must not be numeric");
                    }
                    ict.access_points.emplace_back(w);
                }
            }
        }
        each("ict", {"access_points", "delay_bounds", "link"}, [&](const Line& line) {
            const auto w = words(line.value);
            if (line.key == "delay_bounds") {
                single(line, seen);
                if (w.size() != 2) {
                    throw Error("delay_bounds needs '<d_min_s> <d_max_s>'");
                }
                ict.bounds = {parse_seconds(w[0]), parse_seconds(w[1])};
                if (ict.bounds.min <= 0 || ict.bounds.min > ict.bounds.max) {
                    throw Error("delay bounds need 0 < d_min <= d_max");
                }
            } else if (line.key == "link") {
                if (w.size() != 2 && w.size() != 3) {
                    throw Error("link needs '<node> <node> [delay_s]'");
                }
                netsim::IctLink link{node(w[0]), node(w[1]), std::nullopt};
                if (w.size() == 3) {
                    link.delay = parse_seconds(w[2]);
                    if (*link.delay <= 0) {
                        throw Error("link delay must be positive");
                    }
                }
                ict.links.push_back(link);
            }
        });
    }

    void run() {
        std::set<std::string> seen;
        each("run", {"seed", "repetitions", "time_limit_s", "event_cap"}, [&](const Line& line) {
            single(line, seen);
            auto& run = scenario_.run;
            if (line.key == "seed") {
                run.seed = integer<std::uint64_t>(line.value, "seed");
            } else if (line.key == "repetitions") {
                run.repetitions = integer<std::size_t>(line.value, "repetitions");
                if (run.repetitions == 0) {
                    throw Error("repetitions must be at least 1");
                }
            } else if (line.key == "time_limit_s") {
                run.time_limit = parse_seconds(line.value);
            } else {
                run.event_cap = integer<std::size_t>(line.value, "event_cap");
            }
        });
    }

    void protocol() {
        std::set<std::string> seen;
        each("protocol", {"timer_s", "timer_diameter_factor", "solver", "enumeration_bound"},
             [&](const Line& line) {
                 single(line, seen);
                 auto& p = scenario_.protocol;
                 if (line.key == "timer_s") {
                     p.timer = parse_seconds(line.value);
                     if (p.timer <= 0) {
                         throw Error("timer_s must be positive");
                     }
                 } else if (line.key == "timer_diameter_factor") {
                     p.timer_diameter_factor = decimal(line.value, "timer_diameter_factor");
                     if (!(*p.timer_diameter_factor > 0.0)) {
                         throw Error("timer_diameter_factor must be positive");
                     }
                 } else if (line.key == "solver") {
                     auto mode = solver::parse_solver_mode(line.value);
                     if (!mode) {
                         throw Error("solver must be gcd, intervals or auto");
                     }
                     p.solver = *mode;
                 } else {
                     p.enumeration_bound = integer<std::size_t>(line.value, "enumeration_bound");
                     if (p.enumeration_bound == 0 || p.enumeration_bound > tvl::max_enumeration_bound) {
                         throw Error("enumeration_bound must be in 1.." + std::to_string(tvl::max_enumeration_bound));
                     }
                 }
             });
    }

    AgentId known_agent(std::string_view w) {
        const AgentId id = agent_id(w);
        if (!grid_ids_.contains(id)) {
            throw netsim::ConfigError("dangling agent id " + std::string(w));
        }
        return id;
    }

    void agents() {
        std::map<AgentId, protocol::Capacity> capacity;
        std::set<std::pair<AgentId, std::string>> seen;
        each("agents", {"supply", "absorb", "demand", "offer"}, [&](const Line& line) {
            const std::string_view value = line.value;
            const auto w = words(value);
            if (w.empty()) {
                throw Error(line.key + " needs an agent id");
            }
            const AgentId id = known_agent(w[0]);
            // Text following the i-th word, as a view into the same line.
            auto after = [&](std::size_t i) {
                return trim(value.substr(static_cast<std::size_t>(w[i].data() - value.data()) + w[i].size()));
            };
            const auto rest = after(0);
            if (line.key == "supply" || line.key == "absorb") {
                if (!seen.insert({id, line.key}).second) {
                    throw Error(line.key + " for agent " + std::to_string(id) + " given twice");
                }
                const bool supply = line.key == "supply";
                auto m = parse_mapping(rest, supply ? Direction::Supply : Direction::Demand);
                (supply ? capacity[id].supply : capacity[id].absorb) = std::move(m);
                return;
            }
            if (w.size() < 3) {
                throw Error(line.key + " needs '<agent> <trigger_s> <entries>'");
            }
            netsim::Disequilibrium d;
            d.agent = id;
            d.trigger = parse_seconds(w[1]);
            if (d.trigger > scenario_.run.time_limit) {
                throw Error("trigger time outside the simulation window");
            }
            d.direction = line.key == "demand" ? Direction::Demand : Direction::Supply;
            d.mapping = parse_mapping(after(1), d.direction);
            scenario_.disequilibria.push_back(std::move(d));
        });
        for (auto& [id, cap] : capacity) {
            scenario_.agents.push_back(netsim::AgentSpec{id, std::move(cap)});
        }
    }

    std::string name_;
    std::map<std::string, std::vector<Line>> sections_;
    std::set<AgentId> grid_ids_;
    netsim::Scenario scenario_;
};

}  // namespace

Micros parse_seconds(std::string_view text) {
    const std::string shown(text);
    const auto dot = text.find('.');
    const auto whole = text.substr(0, dot);
    const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    const auto digits = [](std::string_view s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (text.empty() || whole.empty() || !digits(whole) || !digits(frac) ||
        (dot != std::string_view::npos && frac.empty())) {
        throw netsim::ConfigError("non-integer seconds '" + shown + "': expected decimal seconds like 0.02");
    }
    if (frac.size() > 6) {
        throw netsim::ConfigError("seconds '" + shown + "' are finer than a microsecond");
    }
    const auto w = to_integer<Micros>(whole);
    if (!w || *w > std::numeric_limits<Micros>::max() / 1'000'000 - 1) {
        throw netsim::ConfigError("seconds '" + shown + "' out of range");
    }
    Micros f = 0;
    for (std::size_t i = 0; i < 6; ++i) {
        f = f * 10 + (i < frac.size() ? frac[i] - '0' : 0);
    }
    return *w * 1'000'000 + f;
}

TimePowerMapping parse_mapping(std::string_view text, Direction direction) {
    std::vector<MappingEntry> entries;
    for (auto token : words(text)) {
        const auto dash = token.find('-');
        const auto colon = token.find(':');
        if (dash == std::string_view::npos || colon == std::string_view::npos || colon < dash) {
            throw netsim::ConfigError("entry '" + std::string(token) + "' is not 'start-end:watts'");
        }
        MappingEntry e;
        e.interval.start = integer<Seconds>(token.substr(0, dash), "seconds");
        e.interval.end = integer<Seconds>(token.substr(dash + 1, colon - dash - 1), "seconds");
        e.power = PowerQuantum{integer<Watts>(token.substr(colon + 1), "watts"), direction};
        entries.push_back(e);
    }
    if (entries.empty()) {
        throw netsim::ConfigError("expected at least one 'start-end:watts' entry");
    }
    try {
        return TimePowerMapping(std::move(entries));
    } catch (const InvalidMapping& e) {
        throw netsim::ConfigError(e.what());
    }
}

netsim::Scenario parse_scenario(std::istream& in, const std::string& name) {
    return Parser(name).parse(in);
}

netsim::Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError(path + ": cannot open scenario file");
    }
    return parse_scenario(in, path);
}

}  // namespace lpep::cli
