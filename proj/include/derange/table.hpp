#pragma once

// Enumeration of the k-free rows (m_1, ..., m_{k-1}) with m_j < k/j, in
// lexicographic order from greatest to least. The k-th position is always
// zero and is omitted.
//
// Each position j is filled by trying candidate multiplicities from the
// bound floor((k-1)/j) downwards; the first candidate that keeps the
// partial row k-free is the maximal one, and every smaller value is then
// k-free as well. Candidates are decided by the universality criterion,
// then the divisibility criterion, then the subset-sum bit vector.

#include <algorithm>
#include <atomic>
#include <cassert>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "partition.hpp"

namespace derange {

constexpr unsigned max_table_k = 63;

struct TableStats {
    std::uint64_t rows_emitted = 0;
    std::uint64_t partials_considered = 0;
    std::uint64_t pruned_universal = 0;
    std::uint64_t pruned_divisibility = 0;
    std::uint64_t full_tests = 0;

    TableStats& operator+=(TableStats const& o)
    {
        rows_emitted += o.rows_emitted;
        partials_considered += o.partials_considered;
        pruned_universal += o.pruned_universal;
        pruned_divisibility += o.pruned_divisibility;
        full_tests += o.full_tests;
        return *this;
    }

    friend bool operator==(TableStats const&, TableStats const&) = default;
};

/// A complete row for parameter k: multiplicities m_1..m_{k-1}.
struct Row {
    unsigned k = 1;
    Multiplicities ms;
};

template <class F>
concept RowSink = std::invocable<F&, std::span<unsigned const>>;

/// Depth-first driver for one value of k. Not thread-safe; use one instance
/// per thread.
class TableEnumerator {
public:
    explicit TableEnumerator(unsigned k) : k_(k)
    {
        if (k < 1 || k > max_table_k)
            throw std::invalid_argument("TableEnumerator: k must be in [1, 63]");
        frames_.resize(k + 1);
        ms_.assign(k - 1, 0);
        mask_ = (k == 63) ? ~std::uint64_t(0) : (std::uint64_t(1) << (k + 1)) - 1;
        // divisibility_free depends only on the gcd of the present part sizes
        divisible_by_gcd_.assign(k, false);
        for (unsigned g = 0; g < k; ++g)
            for (unsigned d = 2; d <= k / 2; ++d)
                if (k % d != 0 && g % d == 0) {
                    divisible_by_gcd_[g] = true;
                    break;
                }
        frames_[1] = Frame{1u, 0, true, 0};
    }

    unsigned k() const noexcept { return k_; }
    TableStats const& stats() const noexcept { return stats_; }

    /// Full enumeration.
    template <RowSink Sink>
    void run(Sink&& sink)
    {
        descend(1, k_, sink);
    }

    /// Enumerates the distinct prefixes of length `depth` in emission order.
    /// Counters for positions 1..depth are accumulated here.
    std::vector<std::vector<unsigned>> prefixes(unsigned depth)
    {
        depth = std::min(depth, k_ - 1);
        std::vector<std::vector<unsigned>> out;
        auto collect = [&](std::span<unsigned const> ms) {
            out.emplace_back(ms.begin(), ms.begin() + depth);
        };
        descend(1, depth + 1, collect);
        stats_.rows_emitted = 0;
        return out;
    }

    /// Enumerates the rows below a prefix produced by prefixes(). Counters
    /// cover positions after the prefix only.
    template <RowSink Sink>
    void run_from(std::span<unsigned const> prefix, Sink&& sink)
    {
        unsigned j = 1;
        for (unsigned m : prefix) {
            auto const& f = frames_[j];
            std::uint64_t const bits = extend_bits(f.bits, j, m);
            frames_[j + 1] = next_frame(f, j, m, bits);
            ms_[j - 1] = m;
            ++j;
        }
        descend(j, k_, sink);
    }

private:
    struct Frame {
        std::uint64_t bits;    // achievable sums of the prefix before this position
        std::uint64_t partial; // sum_{i < j} i m_i
        bool prefix_ok;        // sum_{i <= u} i m_i >= u for all u < j
        unsigned gcd;          // gcd of present part sizes, 0 if none
    };

    std::uint64_t extend_bits(std::uint64_t bits, unsigned j, unsigned m) const noexcept
    {
        std::uint64_t b = bits;
        for (unsigned a = 0; a < m; ++a)
            b |= (b << j) & mask_;
        return b;
    }

    static Frame next_frame(Frame const& f, unsigned j, unsigned m, std::uint64_t bits) noexcept
    {
        std::uint64_t const partial = f.partial + std::uint64_t(j) * m;
        return Frame{bits, partial, f.prefix_ok && partial >= j,
                     m > 0 ? std::gcd(f.gcd, j) : f.gcd};
    }

    template <class Sink>
    void descend(unsigned j, unsigned stop, Sink& sink)
    {
        if (j == stop) {
            ++stats_.rows_emitted;
            sink(std::span<unsigned const>(ms_.data(), j - 1));
            return;
        }
        Frame const f = frames_[j];
        unsigned const bound = (k_ - 1) / j;

        std::uint64_t cand[max_table_k + 1];
        cand[0] = f.bits;
        for (unsigned m = 1; m <= bound; ++m)
            cand[m] = cand[m - 1] | ((cand[m - 1] << j) & mask_);

        // m = 0 is tested too; it always passes because a prefix of a k-free
        // partial row is k-free.
        unsigned top = 0;
        for (unsigned m = bound + 1; m-- > 0;) {
            ++stats_.partials_considered;
            if (f.prefix_ok && f.partial + std::uint64_t(j) * m >= k_) {
                ++stats_.pruned_universal;
                assert(m > 0);
                continue;
            }
            if (divisible_by_gcd_[m > 0 ? std::gcd(f.gcd, j) : f.gcd]) {
                ++stats_.pruned_divisibility;
                top = m;
                break;
            }
            ++stats_.full_tests;
            if (((cand[m] >> k_) & 1u) == 0) {
                top = m;
                break;
            }
            assert(m > 0);
        }

        for (unsigned m = top + 1; m-- > 0;) {
            ms_[j - 1] = m;
            frames_[j + 1] = next_frame(f, j, m, cand[m]);
            descend(j + 1, stop, sink);
        }
        ms_[j - 1] = 0;
    }

    unsigned k_;
    std::uint64_t mask_;
    std::vector<bool> divisible_by_gcd_;
    std::vector<Frame> frames_;
    std::vector<unsigned> ms_;
    TableStats stats_;
};

/// Streams every k-free row to `sink`, greatest first.
template <RowSink Sink>
TableStats enumerate_rows(unsigned k, Sink&& sink)
{
    TableEnumerator e(k);
    e.run(sink);
    return e.stats();
}

/// Number of rows of the table for k.
inline std::uint64_t rows_count(unsigned k)
{
    return enumerate_rows(k, [](std::span<unsigned const>) {}).rows_emitted;
}

/// Splits the table into independent subtrees keyed by their first two
/// positions, runs `work(prefix, enumerator)` for each on `threads` workers,
/// and returns the per-subtree results in emission order together with the
/// merged counters. The merged counters equal those of a serial run.
template <class Result, class Work>
std::vector<Result> run_table_partitioned(unsigned k, unsigned threads, Work work, TableStats& stats)
{
    TableEnumerator driver(k);
    auto const prefixes = driver.prefixes(2);
    stats = driver.stats();

    std::vector<Result> results(prefixes.size());
    std::vector<TableStats> part_stats(prefixes.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < prefixes.size(); i = next++) {
            TableEnumerator e(k);
            results[i] = work(std::span<unsigned const>(prefixes[i]), e);
            part_stats[i] = e.stats();
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(prefixes.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    for (auto const& s : part_stats)
        stats += s;
    return results;
}

/// Parallel form of enumerate_rows. Rows of each subtree are buffered and
/// delivered to `sink` in the serial order from the calling thread.
template <RowSink Sink>
TableStats enumerate_rows_parallel(unsigned k, unsigned threads, Sink&& sink)
{
    if (threads <= 1 || k < 3)
        return enumerate_rows(k, sink);
    TableStats stats;
    auto buffers = run_table_partitioned<std::vector<unsigned>>(
        k, threads,
        [k](std::span<unsigned const> prefix, TableEnumerator& e) {
            std::vector<unsigned> flat;
            e.run_from(prefix, [&](std::span<unsigned const> ms) {
                flat.insert(flat.end(), ms.begin(), ms.end());
            });
            (void)k;
            return flat;
        },
        stats);
    std::size_t const width = k - 1;
    for (auto const& flat : buffers)
        for (std::size_t i = 0; i < flat.size(); i += width)
            sink(std::span<unsigned const>(flat.data() + i, width));
    return stats;
}

} // namespace derange
