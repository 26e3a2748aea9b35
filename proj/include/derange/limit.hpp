#pragma once

// Limiting probabilities p(inf, k) and i(inf, k) = 1 - p(inf, k) as exact
// exponential polynomials, summed over the rows of the k-free table.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evaluate.hpp"
#include "exp_poly.hpp"
#include "partition.hpp"
#include "table.hpp"

namespace derange {

namespace detail {

/// sum_{0 <= i < n} 1 / (j^i i!)
inline BigRational truncated_exp_series(unsigned j, unsigned n)
{
    BigRational s = 0;
    BigInt denom = 1;
    for (unsigned i = 0; i < n; ++i) {
        if (i > 0)
            denom *= BigInt(j) * i;
        s += BigRational(BigInt(1), denom);
    }
    return s;
}

inline BigRational inverse_weight(unsigned j, unsigned m)
{
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), j, m);
    return BigRational(BigInt(1), p * factorial(m));
}

} // namespace detail

/// x_j(r): the factor of a row's contribution for part size j.
///   m < floor(k/j):  exp(-1/j) / (j^m m!)
///   m = floor(k/j):  1 - exp(-1/j) * sum_{i < floor(k/j)} 1/(j^i i!)
inline ExpPoly row_factor(unsigned k, unsigned j, unsigned m)
{
    if (k < 1 || k > max_table_k || j < 1 || j > k)
        throw std::out_of_range("row_factor: part size out of range");
    unsigned const cap = k / j;
    if (m > cap)
        throw std::out_of_range("row_factor: multiplicity out of range");
    if (m < cap)
        return ExpPoly::term(detail::inverse_weight(j, m), exponent_bit(j));
    return ExpPoly::constant(1) - ExpPoly::term(detail::truncated_exp_series(j, cap), exponent_bit(j));
}

/// Contribution x_1(r) ... x_{k-1}(r) exp(-1/k) of one row (m_1..m_{k-1}).
inline ExpPoly row_contribution(unsigned k, std::span<unsigned const> row)
{
    if (row.size() + 1 != k)
        throw std::invalid_argument("row_contribution: row must have k-1 entries");
    ExpPoly p = ExpPoly::term(1, exponent_bit(k));
    for (unsigned j = 1; j < k; ++j)
        p = p * row_factor(k, j, row[j - 1]);
    return p;
}

inline ExpPoly row_contribution(Row const& r)
{
    auto ms = r.ms.values();
    ms.resize(r.k - 1, 0);
    return row_contribution(r.k, ms);
}

/// Accumulates row contributions grouped by the set C of capped positions
/// (m_j = floor(k/j)). Rows sharing C share the exponential part
/// exp(-q(all \ C)) * prod_{j in C} (1 - s_j exp(-1/j)), so only the sum of
/// their rational weights 1/prod_{j not in C} j^{m_j} m_j! is needed. The
/// weights are kept as integers over the common denominator
/// L = prod_{j<k} j^{b_j} b_j!, b_j = floor((k-1)/j).
class SurvivalAccumulator {
public:
    explicit SurvivalAccumulator(unsigned k) : k_(k), scaled_(k)
    {
        if (k < 1 || k > max_table_k)
            throw std::invalid_argument("SurvivalAccumulator: k must be in [1, 63]");
        common_ = 1;
        for (unsigned j = 1; j < k; ++j) {
            unsigned const b = (k - 1) / j;
            BigInt full;
            mpz_ui_pow_ui(full.get_mpz_t(), j, b);
            full *= factorial(b);
            common_ *= full;
            auto& row = scaled_[j];
            for (unsigned m = 0; m <= b; ++m) {
                if (m == k / j) {
                    row.push_back(full);
                } else {
                    BigInt part;
                    mpz_ui_pow_ui(part.get_mpz_t(), j, m);
                    part *= factorial(m);
                    row.push_back(BigInt(full / part));
                }
            }
        }
    }

    void add_row(std::span<unsigned const> ms)
    {
        ExponentSet capped = 0;
        weight_ = 1;
        for (unsigned j = 1; j < k_; ++j) {
            unsigned const m = ms[j - 1];
            if (m == k_ / j)
                capped |= exponent_bit(j);
            weight_ *= scaled_[j][m];
        }
        sums_[capped] += weight_;
    }

    SurvivalAccumulator& operator+=(SurvivalAccumulator const& o)
    {
        for (auto const& [c, w] : o.sums_)
            sums_[c] += w;
        return *this;
    }

    /// Expanded exact p(inf, k) from the accumulated rows.
    ExpPoly result() const
    {
        ExponentSet const all = (ExponentSet(1) << k_) - 1;
        ExpPoly total;
        for (auto const& [capped, w] : sums_) {
            ExpPoly p = ExpPoly::term(BigRational(w, common_), all & ~capped);
            for (unsigned j = 1; j < k_; ++j)
                if (capped & exponent_bit(j))
                    p = p * (ExpPoly::constant(1) -
                             ExpPoly::term(detail::truncated_exp_series(j, k_ / j), exponent_bit(j)));
            total += p;
        }
        return total;
    }

private:
    unsigned k_;
    BigInt common_;
    std::vector<std::vector<BigInt>> scaled_; // scaled_[j][m] = L_j / (j^m m!), or L_j when capped
    std::map<ExponentSet, BigInt> sums_;
    BigInt weight_;
};

struct LimitComputation {
    ExpPoly survival; // p(inf, k)
    TableStats stats;

    ExpPoly fix_probability() const { return ExpPoly::constant(1) - survival; }
};

/// Runs the table for k and sums the row contributions. With threads > 1
/// the table is split into subtrees whose partial sums are added in a
/// fixed order; exact arithmetic makes the result identical.
inline LimitComputation compute_limit(unsigned k, unsigned threads = 1)
{
    if (k < 1 || k > max_table_k)
        throw std::invalid_argument("compute_limit: k must be in [1, 63]");
    if (threads <= 1 || k < 3) {
        SurvivalAccumulator acc(k);
        auto stats = enumerate_rows(k, [&](std::span<unsigned const> ms) { acc.add_row(ms); });
        return {acc.result(), stats};
    }
    TableStats stats;
    auto parts = run_table_partitioned<std::optional<SurvivalAccumulator>>(
        k, threads,
        [k](std::span<unsigned const> prefix, TableEnumerator& e) {
            std::optional<SurvivalAccumulator> acc(std::in_place, k);
            e.run_from(prefix, [&](std::span<unsigned const> ms) { acc->add_row(ms); });
            return acc;
        },
        stats);
    SurvivalAccumulator total(k);
    for (auto const& p : parts)
        total += *p;
    return {total.result(), stats};
}

/// Exact p(inf, k).
inline ExpPoly limiting_survival(unsigned k, unsigned threads = 1)
{
    return compute_limit(k, threads).survival;
}

/// i(inf, k) to `digits` places. The subtraction 1 - p is done exactly
/// before evaluation, so no precision is lost.
inline HighPrecisionDecimal limiting_fix_probability(unsigned k, unsigned digits, unsigned threads = 1)
{
    return evaluate(compute_limit(k, threads).fix_probability(), digits);
}

/// i(inf, k) * k^delta * (log k)^{3/2}.
inline HighPrecisionDecimal efg_ratio(unsigned k, unsigned digits, unsigned threads = 1)
{
    if (k < 2)
        throw std::invalid_argument("efg_ratio: k must be >= 2");
    return efg_ratio_of(compute_limit(k, threads).fix_probability(), k, digits);
}

} // namespace derange
