#pragma once

#include <map>
#include <vector>

#include "impartial/subset.hpp"

namespace impartial {

/// Per-agent selection probabilities.
struct MarginalVector {
    std::vector<Rational> p;

    explicit MarginalVector(int m) : p(static_cast<std::size_t>(m)) {}
    explicit MarginalVector(std::vector<Rational> values) : p(std::move(values)) {
        for (const Rational& v : p)
            if (v.sign() < 0 || Rational(1) < v)
                throw contract_error("marginal outside [0, 1]");
    }

    int size() const { return static_cast<int>(p.size()); }
    const Rational& operator[](AgentId i) const { return p[static_cast<std::size_t>(i)]; }
    Rational& operator[](AgentId i) { return p[static_cast<std::size_t>(i)]; }

    friend bool operator==(const MarginalVector& a, const MarginalVector& b) { return a.p == b.p; }
};

/// Finitely supported lottery over agent subsets with exact probabilities.
/// Construction merges duplicate sets, drops zero-probability entries and
/// requires the total mass to be exactly one. Whether every support set is
/// independent is a property of the owning instance, checked by the
/// feasibility suite rather than by this type.
class SelectionDistribution {
public:
    SelectionDistribution(int ground, std::vector<std::pair<AgentSubset, Rational>> entries)
        : ground_(ground) {
        std::map<std::uint64_t, Rational> merged;
        for (auto& [set, prob] : entries) {
            if (set.ground != ground) throw contract_error("distribution ground size mismatch");
            if (prob.sign() < 0) throw contract_error("negative probability");
            if (prob.is_zero()) continue;
            merged[set.bits] += prob;
        }
        Rational total;
        for (auto& [bits, prob] : merged) {
            total += prob;
            support_.push_back({AgentSubset(bits, ground), prob});
        }
        if (total != Rational(1))
            throw contract_error("distribution mass must be exactly 1, got " + total.str());
    }

    static SelectionDistribution point_mass(const AgentSubset& s) {
        return SelectionDistribution(s.ground, {{s, Rational(1)}});
    }

    int ground_size() const { return ground_; }

    /// Support entries sorted by set bitmask; probabilities are positive and
    /// sum to one.
    const std::vector<std::pair<AgentSubset, Rational>>& support() const { return support_; }

    /// Probability that agent i is selected.
    Rational marginal(AgentId i) const {
        Rational p;
        for (const auto& [set, prob] : support_)
            if (set.contains(i)) p += prob;
        return p;
    }

    MarginalVector marginals() const {
        MarginalVector mv(ground_);
        for (AgentId i = 0; i < ground_; ++i) mv[i] = marginal(i);
        return mv;
    }

    friend bool operator==(const SelectionDistribution& a, const SelectionDistribution& b) {
        return a.ground_ == b.ground_ && a.support_ == b.support_;
    }

private:
    int ground_;
    std::vector<std::pair<AgentSubset, Rational>> support_;
};

} // namespace impartial
