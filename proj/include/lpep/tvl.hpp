// Ternary vector lists: Boolean functions represented as a union of cubes,
// each cube a row over {0, 1, -}. This is the constraint algebra the cover
// solver is built from.

#pragma once

#include "lpep/core.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lpep::tvl {

using VarId = std::uint32_t;

enum class Ternary : std::uint8_t { Zero, One, Dash };

inline constexpr std::size_t default_enumeration_bound = 24;
/// Assignments are packed into 64-bit words, which caps any bound.
inline constexpr std::size_t max_enumeration_bound = 63;

class WidthMismatch : public Error {
public:
    using Error::Error;
};

class EnumerationTooLarge : public Error {
public:
    using Error::Error;
};

class TernaryVector {
public:
    /// All elements dash.
    explicit TernaryVector(std::size_t width);
    /// Parses a row such as "1-0".
    static TernaryVector parse(std::string_view row);

    std::size_t width() const { return width_; }
    Ternary get(VarId v) const;
    void set(VarId v, Ternary t);

    /// Cube intersection; empty when some variable is fixed to opposite values.
    std::optional<TernaryVector> intersect(const TernaryVector& other) const;

    std::string to_string() const;

    friend bool operator==(const TernaryVector&, const TernaryVector&) = default;

private:
    std::size_t width_;
    std::vector<std::uint64_t> care_;
    std::vector<std::uint64_t> value_;
};

/// Union of the cubes denoted by its rows. No rows denotes constant false.
class TernaryVectorList {
public:
    explicit TernaryVectorList(std::size_t width) : width_(width) {}
    static TernaryVectorList parse(std::size_t width, std::initializer_list<std::string_view> rows);
    /// Single all-dash row: constant true.
    static TernaryVectorList tautology(std::size_t width);

    std::size_t width() const { return width_; }
    const std::vector<TernaryVector>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    void append(TernaryVector row);

private:
    std::size_t width_;
    std::vector<TernaryVector> rows_;
};

/// A total assignment. Variable i is stored at bit (width - 1 - i), so numeric
/// order on `bits` is lexicographic order on the 0/1 string.
struct Assignment {
    std::uint64_t bits = 0;
    std::size_t width = 0;

    bool operator[](VarId v) const { return ((bits >> (width - 1 - v)) & 1U) != 0; }
    std::string to_string() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// Intersection of the denoted sets (row x row, clashing rows dropped).
TernaryVectorList conjunction(const TernaryVectorList& a, const TernaryVectorList& b);
/// Union of the denoted sets (row concatenation, no minimization).
TernaryVectorList disjunction(const TernaryVectorList& a, const TernaryVectorList& b);

/// Exactly k of vars are 1; every other variable dash.
TernaryVectorList symmetric(std::span<const VarId> vars, std::size_t k, std::size_t width);

/// Weighted generalization of `symmetric`: the weights of the variables set to
/// 1 sum to a value in [low, high].
TernaryVectorList weighted_range(std::span<const VarId> vars, std::span<const std::int64_t> weights,
                                 std::int64_t low, std::int64_t high, std::size_t width);

/// All vars 1, or all vars 0.
TernaryVectorList requirement_all_or_nothing(std::span<const VarId> vars, std::size_t width);

/// Accepted groups form a time-ordered prefix: for some p, groups [0, p) are
/// all 1 and the remaining groups all 0.
TernaryVectorList requirement_prefix(const std::vector<std::vector<VarId>>& groups, std::size_t width);

/// Equivalent to conjunction(list, weighted_range(vars, weights, low, high, width))
/// but expands only the dash positions of each row, so fully-specified rows
/// are filtered without materializing the threshold function.
TernaryVectorList restrict_weighted(const TernaryVectorList& list, std::span<const VarId> vars,
                                    std::span<const std::int64_t> weights, std::int64_t low, std::int64_t high);

/// Every satisfying total assignment, deduplicated, in lexicographic order.
/// Throws EnumerationTooLarge when width exceeds the bound.
std::vector<Assignment> solutions(const TernaryVectorList& list,
                                  std::size_t bound = default_enumeration_bound);

}  // namespace lpep::tvl
