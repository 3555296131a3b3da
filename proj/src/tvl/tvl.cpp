#include "lpep/tvl.hpp"

#include <algorithm>
#include <functional>

namespace lpep::tvl {

namespace {

constexpr std::size_t words_for(std::size_t width) { return (width + 63) / 64; }

void check_vars(std::span<const VarId> vars, std::size_t width) {
    std::vector<VarId> sorted(vars.begin(), vars.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw Error("duplicate variable in list");
    }
    if (!sorted.empty() && sorted.back() >= width) {
        throw WidthMismatch("variable " + std::to_string(sorted.back()) + " outside width " +
                            std::to_string(width));
    }
}

// Depth-first enumeration of 0/1 choices over `vars` whose selected weights sum
// into [low, high]. `suffix_max[i]` bounds what positions i.. can still add.
void enumerate_weighted(const TernaryVector& base, std::span<const VarId> vars,
                        std::span<const std::int64_t> weights, const std::vector<std::int64_t>& suffix_max,
                        std::size_t pos, std::int64_t sum, std::int64_t low, std::int64_t high,
                        TernaryVector& row, TernaryVectorList& out) {
    if (sum > high || sum + suffix_max[pos] < low) {
        return;
    }
    if (pos == vars.size()) {
        out.append(row);
        return;
    }
    row.set(vars[pos], Ternary::Zero);
    enumerate_weighted(base, vars, weights, suffix_max, pos + 1, sum, low, high, row, out);
    row.set(vars[pos], Ternary::One);
    enumerate_weighted(base, vars, weights, suffix_max, pos + 1, sum + weights[pos], low, high, row, out);
    row.set(vars[pos], base.get(vars[pos]));
}

std::vector<std::int64_t> suffix_sums(std::span<const std::int64_t> weights) {
    std::vector<std::int64_t> s(weights.size() + 1, 0);
    for (std::size_t i = weights.size(); i-- > 0;) {
        s[i] = s[i + 1] + weights[i];
    }
    return s;
}

}  // namespace

TernaryVector::TernaryVector(std::size_t width)
    : width_(width), care_(words_for(width), 0), value_(words_for(width), 0) {}

TernaryVector TernaryVector::parse(std::string_view row) {
    TernaryVector v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        switch (row[i]) {
        case '0':
            v.set(static_cast<VarId>(i), Ternary::Zero);
            break;
        case '1':
            v.set(static_cast<VarId>(i), Ternary::One);
            break;
        case '-':
            break;
        default:
            throw Error("bad ternary element '" + std::string(1, row[i]) + "'");
        }
    }
    return v;
}

Ternary TernaryVector::get(VarId v) const {
    const std::uint64_t bit = std::uint64_t{1} << (v % 64);
    if ((care_[v / 64] & bit) == 0) {
        return Ternary::Dash;
    }
    return (value_[v / 64] & bit) != 0 ? Ternary::One : Ternary::Zero;
}

void TernaryVector::set(VarId v, Ternary t) {
    const std::uint64_t bit = std::uint64_t{1} << (v % 64);
    auto& c = care_[v / 64];
    auto& val = value_[v / 64];
    switch (t) {
    case Ternary::Dash:
        c &= ~bit;
        val &= ~bit;
        break;
    case Ternary::Zero:
        c |= bit;
        val &= ~bit;
        break;
    case Ternary::One:
        c |= bit;
        val |= bit;
        break;
    }
}

std::optional<TernaryVector> TernaryVector::intersect(const TernaryVector& other) const {
    if (other.width_ != width_) {
        throw WidthMismatch("row widths differ");
    }
    TernaryVector out(width_);
    for (std::size_t w = 0; w < care_.size(); ++w) {
        const std::uint64_t both = care_[w] & other.care_[w];
        if (((value_[w] ^ other.value_[w]) & both) != 0) {
            return std::nullopt;
        }
        out.care_[w] = care_[w] | other.care_[w];
        out.value_[w] = value_[w] | other.value_[w];
    }
    return out;
}

std::string TernaryVector::to_string() const {
    std::string s(width_, '-');
    for (std::size_t i = 0; i < width_; ++i) {
        const Ternary t = get(static_cast<VarId>(i));
        if (t != Ternary::Dash) {
            s[i] = t == Ternary::One ? '1' : '0';
        }
    }
    return s;
}

TernaryVectorList TernaryVectorList::parse(std::size_t width, std::initializer_list<std::string_view> rows) {
    TernaryVectorList list(width);
    for (auto r : rows) {
        list.append(TernaryVector::parse(r));
    }
    return list;
}

TernaryVectorList TernaryVectorList::tautology(std::size_t width) {
    TernaryVectorList list(width);
    list.append(TernaryVector(width));
    return list;
}

void TernaryVectorList::append(TernaryVector row) {
    if (row.width() != width_) {
        throw WidthMismatch("row width " + std::to_string(row.width()) + " in list of width " +
                            std::to_string(width_));
    }
    rows_.push_back(std::move(row));
}

std::string Assignment::to_string() const {
    std::string s(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if ((*this)[static_cast<VarId>(i)]) {
            s[i] = '1';
        }
    }
    return s;
}

TernaryVectorList conjunction(const TernaryVectorList& a, const TernaryVectorList& b) {
    if (a.width() != b.width()) {
        throw WidthMismatch("conjunction of widths " + std::to_string(a.width()) + " and " +
                            std::to_string(b.width()));
    }
    TernaryVectorList out(a.width());
    for (const auto& ra : a.rows()) {
        for (const auto& rb : b.rows()) {
            if (auto r = ra.intersect(rb)) {
                out.append(std::move(*r));
            }
        }
    }
    return out;
}

TernaryVectorList disjunction(const TernaryVectorList& a, const TernaryVectorList& b) {
    if (a.width() != b.width()) {
        throw WidthMismatch("disjunction of widths " + std::to_string(a.width()) + " and " +
                            std::to_string(b.width()));
    }
    TernaryVectorList out = a;
    for (const auto& r : b.rows()) {
        out.append(r);
    }
    return out;
}

TernaryVectorList symmetric(std::span<const VarId> vars, std::size_t k, std::size_t width) {
    if (k > vars.size()) {
        throw Error("symmetric threshold " + std::to_string(k) + " out of range 0.." +
                    std::to_string(vars.size()));
    }
    const std::vector<std::int64_t> ones(vars.size(), 1);
    const auto kk = static_cast<std::int64_t>(k);
    return weighted_range(vars, ones, kk, kk, width);
}

TernaryVectorList weighted_range(std::span<const VarId> vars, std::span<const std::int64_t> weights,
                                 std::int64_t low, std::int64_t high, std::size_t width) {
    return restrict_weighted(TernaryVectorList::tautology(width), vars, weights, low, high);
}

TernaryVectorList requirement_all_or_nothing(std::span<const VarId> vars, std::size_t width) {
    if (vars.empty()) {
        throw Error("all-or-nothing requirement over no variables");
    }
    check_vars(vars, width);
    TernaryVectorList out(width);
    for (Ternary t : {Ternary::Zero, Ternary::One}) {
        TernaryVector row(width);
        for (VarId v : vars) {
            row.set(v, t);
        }
        out.append(std::move(row));
    }
    return out;
}

TernaryVectorList requirement_prefix(const std::vector<std::vector<VarId>>& groups, std::size_t width) {
    if (groups.empty()) {
        throw Error("prefix requirement over no groups");
    }
    std::vector<VarId> all;
    for (const auto& g : groups) {
        if (g.empty()) {
            throw Error("prefix requirement with an empty group");
        }
        all.insert(all.end(), g.begin(), g.end());
    }
    check_vars(all, width);
    TernaryVectorList out(width);
    for (std::size_t p = 0; p <= groups.size(); ++p) {
        TernaryVector row(width);
        for (std::size_t j = 0; j < groups.size(); ++j) {
            for (VarId v : groups[j]) {
                row.set(v, j < p ? Ternary::One : Ternary::Zero);
            }
        }
        out.append(std::move(row));
    }
    return out;
}

TernaryVectorList restrict_weighted(const TernaryVectorList& list, std::span<const VarId> vars,
                                    std::span<const std::int64_t> weights, std::int64_t low, std::int64_t high) {
    if (vars.size() != weights.size()) {
        throw Error("weights and variables differ in length");
    }
    if (std::any_of(weights.begin(), weights.end(), [](std::int64_t w) { return w < 0; })) {
        throw Error("negative weight");
    }
    check_vars(vars, list.width());
    TernaryVectorList out(list.width());
    std::vector<VarId> dash_vars;
    std::vector<std::int64_t> dash_weights;
    for (const auto& row : list.rows()) {
        std::int64_t fixed = 0;
        dash_vars.clear();
        dash_weights.clear();
        for (std::size_t i = 0; i < vars.size(); ++i) {
            switch (row.get(vars[i])) {
            case Ternary::One:
                fixed += weights[i];
                break;
            case Ternary::Dash:
                dash_vars.push_back(vars[i]);
                dash_weights.push_back(weights[i]);
                break;
            case Ternary::Zero:
                break;
            }
        }
        const auto suffix = suffix_sums(dash_weights);
        TernaryVector scratch = row;
        enumerate_weighted(row, dash_vars, dash_weights, suffix, 0, fixed, low, high, scratch, out);
    }
    return out;
}

std::vector<Assignment> solutions(const TernaryVectorList& list, std::size_t bound) {
    bound = std::min(bound, max_enumeration_bound);
    if (list.width() > bound) {
        throw EnumerationTooLarge("enumeration too large: width " + std::to_string(list.width()) +
                                  " exceeds bound " + std::to_string(bound));
    }
    const std::size_t width = list.width();
    std::vector<Assignment> out;
    std::vector<std::size_t> dash_shift;
    for (const auto& row : list.rows()) {
        std::uint64_t base = 0;
        dash_shift.clear();
        for (std::size_t i = 0; i < width; ++i) {
            const std::size_t shift = width - 1 - i;
            switch (row.get(static_cast<VarId>(i))) {
            case Ternary::One:
                base |= std::uint64_t{1} << shift;
                break;
            case Ternary::Dash:
                dash_shift.push_back(shift);
                break;
            case Ternary::Zero:
                break;
            }
        }
        const std::uint64_t combos = std::uint64_t{1} << dash_shift.size();
        for (std::uint64_t c = 0; c < combos; ++c) {
            std::uint64_t bits = base;
            for (std::size_t d = 0; d < dash_shift.size(); ++d) {
                if ((c >> d) & 1U) {
                    bits |= std::uint64_t{1} << dash_shift[d];
                }
            }
            out.push_back(Assignment{bits, width});
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace lpep::tvl
