#pragma once

// Exact exponential polynomials sum_S c_S * exp(-sum_{j in S} 1/j) with
// rational coefficients. S is a subset of {1..63}, stored as a bit mask
// where bit (j-1) stands for part size j.

#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <stdexcept>

#include <gmpxx.h>

#include "partition.hpp"

namespace derange {

using ExponentSet = std::uint64_t;

constexpr unsigned max_exponent_index = 63;

constexpr ExponentSet exponent_bit(unsigned j)
{
    return ExponentSet(1) << (j - 1);
}

/// q_S = sum_{j in S} 1/j as an exact rational.
inline BigRational exponent_value(ExponentSet s)
{
    BigRational q = 0;
    while (s != 0) {
        unsigned const j = unsigned(std::countr_zero(s)) + 1;
        q += BigRational(1, j);
        s &= s - 1;
    }
    return q;
}

class ExpPoly {
public:
    using Terms = std::map<ExponentSet, BigRational>;

    ExpPoly() = default;

    static ExpPoly constant(BigRational const& c) { return term(c, 0); }

    /// Single term c * exp(-q_S).
    static ExpPoly term(BigRational const& c, ExponentSet s)
    {
        ExpPoly p;
        p.add_term(s, c);
        return p;
    }

    Terms const& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    /// Coefficient of exp(-q_S); zero when absent.
    BigRational coefficient(ExponentSet s) const
    {
        auto it = terms_.find(s);
        return it == terms_.end() ? BigRational(0) : it->second;
    }

    /// Union of all exponent sets that occur.
    ExponentSet support() const noexcept
    {
        ExponentSet u = 0;
        for (auto const& [s, c] : terms_)
            u |= s;
        return u;
    }

    void add_term(ExponentSet s, BigRational c)
    {
        c.canonicalize();
        if (c == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(s, std::move(c));
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    ExpPoly& operator+=(ExpPoly const& o)
    {
        for (auto const& [s, c] : o.terms_)
            add_term(s, c);
        return *this;
    }

    ExpPoly& operator-=(ExpPoly const& o)
    {
        for (auto const& [s, c] : o.terms_)
            add_term(s, -c);
        return *this;
    }

    ExpPoly& operator*=(BigRational const& f)
    {
        if (f == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [s, c] : terms_)
            c *= f;
        return *this;
    }

    /// Product of two polynomials. Every pair of multiplied exponent sets
    /// must be disjoint, otherwise exp(-2/j) would arise.
    friend ExpPoly operator*(ExpPoly const& a, ExpPoly const& b)
    {
        ExpPoly r;
        for (auto const& [sa, ca] : a.terms_)
            for (auto const& [sb, cb] : b.terms_) {
                if ((sa & sb) != 0)
                    throw std::domain_error("ExpPoly: overlapping exponent sets in product");
                r.add_term(sa | sb, ca * cb);
            }
        return r;
    }

    friend ExpPoly operator+(ExpPoly a, ExpPoly const& b) { return a += b; }
    friend ExpPoly operator-(ExpPoly a, ExpPoly const& b) { return a -= b; }
    friend ExpPoly operator-(ExpPoly a)
    {
        for (auto& [s, c] : a.terms_)
            c = -c;
        return a;
    }

    friend bool operator==(ExpPoly const& a, ExpPoly const& b) { return a.terms_ == b.terms_; }

    /// Value with every exponential replaced by 1, i.e. sum of coefficients.
    BigRational coefficient_sum() const
    {
        BigRational s = 0;
        for (auto const& [e, c] : terms_)
            s += c;
        return s;
    }

    /// sum |c_S|, the magnitude bound used by the evaluator.
    BigRational abs_coefficient_sum() const
    {
        BigRational s = 0;
        for (auto const& [e, c] : terms_)
            s += abs(c);
        return s;
    }

private:
    Terms terms_;
};

} // namespace derange
