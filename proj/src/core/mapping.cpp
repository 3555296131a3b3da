#include "lpep/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace lpep {

std::optional<TimeInterval> interval_intersect(const TimeInterval& a, const TimeInterval& b) {
    TimeInterval r{std::max(a.start, b.start), std::min(a.end, b.end)};
    if (!r.valid()) {
        return std::nullopt;
    }
    return r;
}

const char* to_string(Direction d) {
    return d == Direction::Supply ? "supply" : "demand";
}

TimePowerMapping::TimePowerMapping(std::vector<MappingEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const MappingEntry& x, const MappingEntry& y) {
        return x.interval < y.interval;
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!e.interval.valid()) {
            throw InvalidMapping("invalid interval [" + std::to_string(e.interval.start) + "," +
                                 std::to_string(e.interval.end) + ")");
        }
        if (e.power.magnitude <= 0) {
            throw InvalidMapping("non-positive magnitude " + std::to_string(e.power.magnitude));
        }
        if (e.power.direction != entries_.front().power.direction) {
            throw InvalidMapping("mixed directions in one mapping");
        }
        if (i > 0 && entries_[i - 1].interval.end > e.interval.start) {
            throw InvalidMapping("overlapping intervals at " + std::to_string(e.interval.start));
        }
    }
}

TimePowerMapping TimePowerMapping::single(TimeInterval interval, Watts magnitude, Direction direction) {
    return TimePowerMapping({MappingEntry{interval, PowerQuantum{magnitude, direction}}});
}

std::optional<Direction> TimePowerMapping::direction() const {
    if (entries_.empty()) {
        return std::nullopt;
    }
    return entries_.front().power.direction;
}

TimePowerMapping TimePowerMapping::with_direction(Direction d) const {
    TimePowerMapping out = *this;
    for (auto& e : out.entries_) {
        e.power.direction = d;
    }
    return out;
}

Watts TimePowerMapping::power_at(Seconds t) const {
    for (const auto& e : entries_) {
        if (e.interval.contains(t)) {
            return e.power.magnitude;
        }
    }
    return 0;
}

Watts TimePowerMapping::max_magnitude() const {
    Watts m = 0;
    for (const auto& e : entries_) {
        m = std::max(m, e.power.magnitude);
    }
    return m;
}

std::int64_t TimePowerMapping::energy() const {
    std::int64_t total = 0;
    for (const auto& e : entries_) {
        total += e.power.magnitude * e.interval.duration();
    }
    return total;
}

TimeInterval TimePowerMapping::span() const {
    if (entries_.empty()) {
        throw InvalidMapping("span of empty mapping");
    }
    return {entries_.front().interval.start, entries_.back().interval.end};
}

TimePowerMapping TimePowerMapping::normalized() const {
    std::vector<MappingEntry> merged;
    for (const auto& e : entries_) {
        if (!merged.empty() && merged.back().interval.end == e.interval.start &&
            merged.back().power == e.power) {
            merged.back().interval.end = e.interval.end;
        } else {
            merged.push_back(e);
        }
    }
    TimePowerMapping out;
    out.entries_ = std::move(merged);
    return out;
}

TimePowerMapping TimePowerMapping::clipped(const TimeInterval& window) const {
    TimePowerMapping out;
    for (const auto& e : entries_) {
        if (auto cut = interval_intersect(e.interval, window)) {
            out.entries_.push_back(MappingEntry{*cut, e.power});
        }
    }
    return out;
}

std::string TimePowerMapping::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (i > 0) {
            os << ' ';
        }
        os << e.interval.start << '-' << e.interval.end << ':' << e.power.magnitude;
    }
    return os.str();
}

namespace {

// Elementary segments of the union of breakpoints, restricted to the union of supports.
std::vector<TimeInterval> elementary_segments(const TimePowerMapping& a, const TimePowerMapping& b) {
    std::vector<Seconds> cuts;
    for (const auto* m : {&a, &b}) {
        for (const auto& e : m->entries()) {
            cuts.push_back(e.interval.start);
            cuts.push_back(e.interval.end);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<TimeInterval> segments;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        segments.push_back({cuts[i], cuts[i + 1]});
    }
    return segments;
}

template <typename Op>
TimePowerMapping combine(const TimePowerMapping& a, const TimePowerMapping& b, Direction direction, Op op) {
    std::vector<MappingEntry> out;
    for (const auto& seg : elementary_segments(a, b)) {
        const Watts v = op(a.power_at(seg.start), b.power_at(seg.start));
        if (v > 0) {
            out.push_back(MappingEntry{seg, PowerQuantum{v, direction}});
        }
    }
    return TimePowerMapping(std::move(out));
}

}  // namespace

TimePowerMapping piecewise_min(const TimePowerMapping& a, const TimePowerMapping& b, Direction direction) {
    return combine(a, b, direction, [](Watts x, Watts y) { return std::min(x, y); });
}

TimePowerMapping piecewise_sub(const TimePowerMapping& a, const TimePowerMapping& b) {
    const Direction d = a.direction().value_or(b.direction().value_or(Direction::Supply));
    return combine(a, b, d, [](Watts x, Watts y) { return x > y ? x - y : Watts{0}; });
}

TimePowerMapping piecewise_add(const TimePowerMapping& a, const TimePowerMapping& b, Direction direction) {
    return combine(a, b, direction, [](Watts x, Watts y) { return x + y; });
}

bool dominates(const TimePowerMapping& a, const TimePowerMapping& b) {
    for (const auto& seg : elementary_segments(a, b)) {
        if (a.power_at(seg.start) < b.power_at(seg.start)) {
            return false;
        }
    }
    return true;
}

Seconds duration_gcd(std::span<const TimePowerMapping> mappings) {
    Seconds g = 0;
    bool any = false;
    for (const auto& m : mappings) {
        for (const auto& e : m.entries()) {
            g = std::gcd(g, e.interval.duration());
            any = true;
        }
    }
    if (!any) {
        throw Error("no intervals");
    }
    return g;
}

Watts power_gcd(std::span<const TimePowerMapping> mappings) {
    Watts g = 0;
    bool any = false;
    for (const auto& m : mappings) {
        for (const auto& e : m.entries()) {
            g = std::gcd(g, e.power.magnitude);
            any = true;
        }
    }
    if (!any) {
        throw Error("no intervals");
    }
    return g;
}

}  // namespace lpep
