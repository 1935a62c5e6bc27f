#pragma once

#include <vector>

#include "impartial/rational.hpp"
#include "impartial/subset.hpp"

namespace impartial {

/// m-by-m matrix of mutual scores. Entry (i, j) is the score agent i casts
/// for agent j; diagonal entries are identically zero and all entries are
/// nonnegative.
class ScoreMatrix {
public:
    explicit ScoreMatrix(int m) : m_(m), entries_(static_cast<std::size_t>(m) * m) {
        if (m < 0 || m > 64) throw contract_error("score matrix size must be in [0, 64]");
    }

    int size() const { return m_; }

    const Rational& at(AgentId i, AgentId j) const {
        check(i);
        check(j);
        return entries_[static_cast<std::size_t>(i) * m_ + j];
    }

    void set(AgentId i, AgentId j, const Rational& w) {
        check(i);
        check(j);
        if (w.sign() < 0) throw contract_error("scores must be nonnegative");
        if (i == j && !w.is_zero()) throw contract_error("diagonal scores must be zero");
        entries_[static_cast<std::size_t>(i) * m_ + j] = w;
    }

    /// Number of agents that receive a positive score from i.
    int row_support(AgentId i) const {
        check(i);
        int n = 0;
        for (AgentId j = 0; j < m_; ++j)
            if (!at(i, j).is_zero()) ++n;
        return n;
    }

    /// max_i |{j : w_ij > 0}|; a matrix is d-sparse iff sparsity() <= d.
    int sparsity() const {
        int s = 0;
        for (AgentId i = 0; i < m_; ++i) s = std::max(s, row_support(i));
        return s;
    }

    bool is_binary() const {
        for (const Rational& w : entries_)
            if (!w.is_zero() && w != Rational(1)) return false;
        return true;
    }

    /// Copy with row i replaced by zeros (the matrix W_{-i}).
    ScoreMatrix without_row(AgentId i) const {
        check(i);
        ScoreMatrix w = *this;
        for (AgentId j = 0; j < m_; ++j)
            w.entries_[static_cast<std::size_t>(i) * m_ + j] = Rational(0);
        return w;
    }

    /// Copy with row i replaced by the given row vector.
    ScoreMatrix with_row(AgentId i, const std::vector<Rational>& row) const {
        check(i);
        if (static_cast<int>(row.size()) != m_)
            throw contract_error("replacement row has wrong length");
        ScoreMatrix w = *this;
        for (AgentId j = 0; j < m_; ++j) w.set(i, j, Rational(0));
        for (AgentId j = 0; j < m_; ++j) w.set(i, j, row[j]);
        return w;
    }

    std::vector<Rational> row(AgentId i) const {
        check(i);
        std::vector<Rational> out(static_cast<std::size_t>(m_));
        for (AgentId j = 0; j < m_; ++j) out[j] = at(i, j);
        return out;
    }

    /// Total score received by agent j from all agents.
    Rational agent_total(AgentId j) const {
        check(j);
        Rational t;
        for (AgentId i = 0; i < m_; ++i) t += at(i, j);
        return t;
    }

    std::vector<Rational> agent_totals() const {
        std::vector<Rational> out(static_cast<std::size_t>(m_));
        for (AgentId j = 0; j < m_; ++j) out[j] = agent_total(j);
        return out;
    }

    friend bool operator==(const ScoreMatrix& a, const ScoreMatrix& b) {
        return a.m_ == b.m_ && a.entries_ == b.entries_;
    }

private:
    void check(AgentId i) const {
        if (i < 0 || i >= m_) throw contract_error("agent index out of range");
    }

    int m_;
    std::vector<Rational> entries_;
};

/// Total score of `targets` counting only votes cast by `voters`.
inline Rational score_from(const ScoreMatrix& w, const AgentSubset& voters,
                           const AgentSubset& targets) {
    if (voters.ground != w.size() || targets.ground != w.size())
        throw contract_error("score_from ground size mismatch");
    Rational total;
    for (AgentId j : targets.members())
        for (AgentId i : voters.members()) total += w.at(i, j);
    return total;
}

/// Per-agent totals restricted to a voter set.
inline std::vector<Rational> observed_totals(const ScoreMatrix& w, const AgentSubset& voters) {
    std::vector<Rational> out(static_cast<std::size_t>(w.size()));
    for (AgentId j = 0; j < w.size(); ++j)
        out[j] = score_from(w, voters, AgentSubset::single(j, w.size()));
    return out;
}

} // namespace impartial
