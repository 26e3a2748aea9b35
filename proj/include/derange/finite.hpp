#pragma once

// Exact i(n, k) and p(n, k) = 1 - i(n, k) by summing 1/z over all cycle
// types of Sym_n that admit a subpartition of size k.

#include <algorithm>
#include <atomic>
#include <bitset>
#include <concepts>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "partition.hpp"

namespace derange {

struct FiniteResult {
    unsigned n = 0;
    unsigned k = 0;
    BigRational fix_probability; // i(n, k)
    BigRational survival;        // p(n, k)
};

template <class F>
concept PartitionSink = std::invocable<F&, Multiplicities const&>;

namespace detail {

template <class Sink>
void partitions_rec(unsigned max_part, unsigned remaining, std::vector<unsigned>& ms, Sink& sink,
                    std::uint64_t& count)
{
    if (remaining == 0) {
        ++count;
        sink(Multiplicities(ms));
        return;
    }
    for (unsigned j = std::min(max_part, remaining); j >= 1; --j)
        for (unsigned m = remaining / j; m >= 1; --m) {
            ms[j - 1] = m;
            partitions_rec(j - 1, remaining - m * j, ms, sink, count);
            ms[j - 1] = 0;
        }
}

} // namespace detail

/// Streams every partition of n as a length-n multiplicity vector, in
/// descending lexicographic order of the part lists. Returns p(n).
template <PartitionSink Sink>
std::uint64_t partitions_of(unsigned n, Sink&& sink)
{
    if (n < 1)
        throw std::invalid_argument("partitions_of: n must be >= 1");
    std::vector<unsigned> ms(n, 0);
    std::uint64_t count = 0;
    detail::partitions_rec(n, n, ms, sink, count);
    return count;
}

/// True when a permutation of cycle type ms fixes some k-set.
inline bool fixes_set(unsigned k, Multiplicities const& ms)
{
    if (universality_index(ms) >= k)
        return true;
    return subpartition_sums(ms, k).contains(k);
}

/// i(n, k) for a single pair, partition by partition.
inline FiniteResult finite_fix_probability(unsigned n, unsigned k)
{
    if (k < 1 || k > n)
        throw std::invalid_argument("finite_fix_probability: need 1 <= k <= n");
    BigRational sum = 0;
    partitions_of(n, [&](Multiplicities const& ms) {
        if (fixes_set(k, ms))
            sum += BigRational(BigInt(1), centralizer_size(ms));
    });
    return {n, k, sum, BigRational(1) - sum};
}

constexpr unsigned max_finite_n = 127;

/// One pass over the partitions of n serving every k at once. Each cycle
/// type contributes its class size n!/z to the counter of every k in its
/// subpartition-sum set, so counts[k] is the number of permutations in
/// Sym_n fixing some k-set.
class FiniteCounter {
public:
    FiniteCounter(unsigned n, unsigned k_max) : n_(n), k_max_(std::min(k_max, n))
    {
        if (n < 1 || n > max_finite_n)
            throw std::invalid_argument("FiniteCounter: n must be in [1, 127]");
        counts_.assign(k_max_ + 1, 0);
        for (unsigned s = 0; s <= n; ++s)
            mask_.set(s);
        divisor_.resize(n + 1);
        for (unsigned j = 1; j <= n; ++j) {
            divisor_[j].resize(n / j + 1);
            for (unsigned m = 0; m <= n / j; ++m) {
                BigInt p;
                mpz_ui_pow_ui(p.get_mpz_t(), j, m);
                divisor_[j][m] = p * factorial(m);
            }
        }
        levels_.resize(n + 2);
    }

    void run()
    {
        levels_[0].bits.reset();
        levels_[0].bits.set(0);
        levels_[0].count = factorial(n_);
        rec(0, n_, n_);
    }

    unsigned n() const noexcept { return n_; }
    std::vector<BigInt> const& counts() const noexcept { return counts_; }

    BigRational fix_probability(unsigned k) const
    {
        BigRational q(counts_.at(k), factorial(n_));
        q.canonicalize();
        return q;
    }

private:
    using Bits = std::bitset<max_finite_n + 1>;

    struct Level {
        Bits bits;
        BigInt count;
    };

    void rec(unsigned depth, unsigned max_part, unsigned remaining)
    {
        Level const& cur = levels_[depth];
        if (remaining == 0) {
            for (unsigned k = 1; k <= k_max_; ++k)
                if (cur.bits.test(k))
                    counts_[k] += cur.count;
            return;
        }
        Level& next = levels_[depth + 1];
        for (unsigned j = std::min(max_part, remaining); j >= 1; --j) {
            next.bits = cur.bits;
            for (unsigned m = 1; m <= remaining / j; ++m) {
                next.bits |= (next.bits << j) & mask_;
                mpz_divexact(next.count.get_mpz_t(), cur.count.get_mpz_t(),
                             divisor_[j][m].get_mpz_t());
                rec(depth + 1, j - 1, remaining - m * j);
            }
        }
    }

    unsigned n_;
    unsigned k_max_;
    Bits mask_;
    std::vector<std::vector<BigInt>> divisor_;
    std::vector<Level> levels_;
    std::vector<BigInt> counts_;
};

/// i(n, k) for every 1 <= k <= k_max from one shared pass.
inline std::vector<FiniteResult> finite_row(unsigned n, unsigned k_max)
{
    FiniteCounter c(n, k_max);
    c.run();
    std::vector<FiniteResult> out;
    for (unsigned k = 1; k <= std::min(k_max, n); ++k) {
        auto const i = c.fix_probability(k);
        out.push_back({n, k, i, BigRational(1) - i});
    }
    return out;
}

namespace detail {

/// Runs f(n) for every n in [lo, hi] on `threads` workers, largest n first;
/// results are returned indexed by n - lo.
template <class Result, class F>
std::vector<Result> parallel_over_n(unsigned lo, unsigned hi, unsigned threads, F f)
{
    std::vector<Result> out(hi >= lo ? hi - lo + 1 : 0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < out.size(); i = next++) {
            unsigned const n = hi - unsigned(i);
            out[n - lo] = f(n);
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(out.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    return out;
}

} // namespace detail

/// i(n, k) for 2 <= n <= n_max and 1 <= k <= min(n/2, k_max), ordered by
/// (n, k).
inline std::vector<FiniteResult> finite_table(unsigned n_max, unsigned k_max, unsigned threads = 1)
{
    if (n_max < 2)
        throw std::invalid_argument("finite_table: n_max must be >= 2");
    if (n_max > max_finite_n)
        throw std::invalid_argument("finite_table: n_max must be <= 127");
    auto rows = detail::parallel_over_n<std::vector<FiniteResult>>(
        2, n_max, threads, [k_max](unsigned n) { return finite_row(n, std::min(n / 2, k_max)); });
    std::vector<FiniteResult> out;
    for (auto& r : rows)
        for (auto& cell : r)
            out.push_back(std::move(cell));
    return out;
}

/// Pairs (n, k) with 2(k+1) <= n <= n_max and i(n, k) < i(n, k+1), compared
/// exactly. Pairs with k+1 > n/2 are excluded: there i(n, k+1) = i(n, n-k-1)
/// and the comparison only restates the symmetry.
inline std::set<std::pair<unsigned, unsigned>> exceptions(unsigned n_max, unsigned threads = 1)
{
    if (n_max < 4)
        throw std::invalid_argument("exceptions: n_max must be >= 4");
    if (n_max > max_finite_n)
        throw std::invalid_argument("exceptions: n_max must be <= 127");
    auto per_n = detail::parallel_over_n<std::vector<unsigned>>(2, n_max, threads, [](unsigned n) {
        FiniteCounter c(n, n / 2);
        c.run();
        std::vector<unsigned> ks;
        auto const& counts = c.counts();
        for (unsigned k = 1; 2 * (k + 1) <= n; ++k)
            if (counts[k] < counts[k + 1]) // common denominator n!
                ks.push_back(k);
        return ks;
    });
    std::set<std::pair<unsigned, unsigned>> out;
    for (unsigned n = 2; n <= n_max; ++n)
        for (unsigned k : per_n[n - 2])
            out.emplace(n, k);
    return out;
}

} // namespace derange
