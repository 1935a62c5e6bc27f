#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "impartial/rational.hpp"

namespace impartial {

/// Agents are 0-based indices into the ground set; index 0 is the first
/// agent of the canonical total order.
using AgentId = int;

/// Subset of a ground set of m agents, m <= 64, as a bitmask. Bit i is set
/// iff agent i belongs to the subset. Carries the ground size so mismatched
/// comparisons fail loudly.
struct AgentSubset {
    std::uint64_t bits = 0;
    int ground = 0;

    AgentSubset() = default;
    AgentSubset(std::uint64_t b, int m) : bits(b), ground(m) {
        if (m < 0 || m > 64) throw contract_error("ground size must be in [0, 64]");
        if (m < 64 && (b >> m) != 0) throw contract_error("subset has members outside ground set");
    }

    static AgentSubset empty(int m) { return AgentSubset(0, m); }
    static AgentSubset full(int m) {
        return AgentSubset(m == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << m) - 1), m);
    }
    static AgentSubset single(AgentId i, int m) {
        check_id(i, m);
        return AgentSubset(std::uint64_t{1} << i, m);
    }
    static AgentSubset of(std::initializer_list<AgentId> ids, int m) {
        std::uint64_t b = 0;
        for (AgentId i : ids) {
            check_id(i, m);
            b |= std::uint64_t{1} << i;
        }
        return AgentSubset(b, m);
    }

    bool contains(AgentId i) const { return i >= 0 && i < ground && ((bits >> i) & 1u); }
    int count() const { return std::popcount(bits); }
    bool is_empty() const { return bits == 0; }

    AgentSubset with(AgentId i) const {
        check_id(i, ground);
        return AgentSubset(bits | (std::uint64_t{1} << i), ground);
    }
    AgentSubset without(AgentId i) const {
        check_id(i, ground);
        return AgentSubset(bits & ~(std::uint64_t{1} << i), ground);
    }

    bool subset_of(const AgentSubset& other) const { return (bits & ~other.bits) == 0; }

    AgentSubset unite(const AgentSubset& o) const { return AgentSubset(bits | o.bits, ground); }
    AgentSubset intersect(const AgentSubset& o) const { return AgentSubset(bits & o.bits, ground); }
    AgentSubset minus(const AgentSubset& o) const { return AgentSubset(bits & ~o.bits, ground); }
    AgentSubset complement() const { return AgentSubset(full(ground).bits & ~bits, ground); }

    std::vector<AgentId> members() const {
        std::vector<AgentId> out;
        out.reserve(static_cast<std::size_t>(count()));
        std::uint64_t b = bits;
        while (b) {
            out.push_back(std::countr_zero(b));
            b &= b - 1;
        }
        return out;
    }

    friend bool operator==(const AgentSubset& a, const AgentSubset& b) {
        return a.bits == b.bits && a.ground == b.ground;
    }
    friend bool operator!=(const AgentSubset& a, const AgentSubset& b) { return !(a == b); }

    std::string str() const {
        std::string out = "{";
        bool first = true;
        for (AgentId i : members()) {
            if (!first) out += ",";
            out += std::to_string(i);
            first = false;
        }
        return out + "}";
    }

    friend std::ostream& operator<<(std::ostream& os, const AgentSubset& s) {
        return os << s.str();
    }

private:
    static void check_id(AgentId i, int m) {
        if (i < 0 || i >= m) throw contract_error("agent index out of range for ground set");
    }
};

/// Canonical total order over subsets: map S to its bitstring (coordinate i
/// is [agent i in S], coordinate 0 first) and compare lexicographically.
/// A set containing agent 0 therefore beats any set without it. This is the
/// tie-breaking order used everywhere below.
inline std::strong_ordering lex_set_compare(const AgentSubset& s, const AgentSubset& t) {
    if (s.ground != t.ground)
        throw contract_error("lex_set_compare on mismatched ground sizes");
    if (s.bits == t.bits) return std::strong_ordering::equal;
    // The first differing coordinate is the lowest differing bit; whoever
    // holds it is lexicographically greater.
    int k = std::countr_zero(s.bits ^ t.bits);
    return s.contains(k) ? std::strong_ordering::greater : std::strong_ordering::less;
}

} // namespace impartial
