#pragma once

// Multiplicity-vector partitions and the k-free tests used by both the
// limiting table algorithm and the finite engine.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace derange {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Cycle-count multiplicities of a partition (1^{m_1} 2^{m_2} ... l^{m_l}).
/// Position j (1-based) holds the number of parts of size j. Trailing zeros
/// are allowed and do not change the represented partition.
class Multiplicities {
public:
    Multiplicities() = default;
    Multiplicities(std::initializer_list<unsigned> ms) : ms_(ms) {}
    explicit Multiplicities(std::vector<unsigned> ms) : ms_(std::move(ms)) {}

    /// Length l of the stored sequence (including trailing zeros).
    std::size_t length() const noexcept { return ms_.size(); }
    bool empty() const noexcept { return ms_.empty(); }

    /// m_j for 1-based part size j; zero beyond the stored length.
    unsigned operator[](std::size_t j) const noexcept
    {
        return (j >= 1 && j <= ms_.size()) ? ms_[j - 1] : 0u;
    }

    /// Total size sum j * m_j.
    std::uint64_t size() const noexcept
    {
        std::uint64_t s = 0;
        for (std::size_t j = 1; j <= ms_.size(); ++j)
            s += j * std::uint64_t(ms_[j - 1]);
        return s;
    }

    std::vector<unsigned> const& values() const noexcept { return ms_; }

    /// Copy with trailing zeros removed.
    Multiplicities stripped() const
    {
        auto v = ms_;
        while (!v.empty() && v.back() == 0)
            v.pop_back();
        return Multiplicities(std::move(v));
    }

    friend bool operator==(Multiplicities const& a, Multiplicities const& b)
    {
        std::size_t const n = std::max(a.length(), b.length());
        for (std::size_t j = 1; j <= n; ++j)
            if (a[j] != b[j])
                return false;
        return true;
    }

private:
    std::vector<unsigned> ms_;
};

/// Achievable subpartition sizes 0..cap as a dense bit vector.
/// Bit s is set when some sub-multiset of the parts sums to s.
class SumSet {
public:
    explicit SumSet(std::size_t cap) : cap_(cap), words_(cap / 64 + 1, 0)
    {
        words_[0] = 1; // the empty subpartition
    }

    std::size_t cap() const noexcept { return cap_; }

    bool contains(std::size_t s) const noexcept
    {
        return s <= cap_ && ((words_[s / 64] >> (s % 64)) & 1u);
    }

    /// Adds up to `count` copies of a part of size `part`.
    void add_parts(std::size_t part, unsigned count)
    {
        if (part == 0 || part > cap_)
            return;
        for (unsigned a = 0; a < count; ++a) {
            std::vector<std::uint64_t> const before = words_;
            or_shifted(before, part);
            if (before == words_)
                break; // saturated: further copies cannot add sums
        }
    }

    /// Sorted list of achievable sizes.
    std::vector<std::size_t> elements() const
    {
        std::vector<std::size_t> out;
        for (std::size_t s = 0; s <= cap_; ++s)
            if (contains(s))
                out.push_back(s);
        return out;
    }

private:
    void or_shifted(std::vector<std::uint64_t> const& src, std::size_t shift)
    {
        std::size_t const ws = shift / 64, bs = shift % 64;
        for (std::size_t i = words_.size(); i-- > ws;) {
            std::uint64_t v = src[i - ws] << bs;
            if (bs != 0 && i - ws >= 1)
                v |= src[i - ws - 1] >> (64 - bs);
            words_[i] |= v;
        }
        // clear bits above cap
        std::size_t const top = cap_ % 64;
        if (top != 63)
            words_.back() &= (std::uint64_t(1) << (top + 1)) - 1;
    }

    std::size_t cap_;
    std::vector<std::uint64_t> words_;
};

/// Largest s such that sum_{j <= min(u, l)} j m_j >= u for every u <= s.
/// Zero when m_1 = 0 or ms is empty; the full size when no prefix fails.
inline std::uint64_t universality_index(Multiplicities const& ms)
{
    std::uint64_t partial = 0;
    std::uint64_t last_ok = 0;
    for (std::size_t u = 1; u <= ms.length(); ++u) {
        partial += u * std::uint64_t(ms[u]);
        if (partial < u)
            return last_ok;
        last_ok = partial;
    }
    return last_ok;
}

/// True when some d in [2, k/2] with k mod d != 0 divides every part size
/// present in ms. Sufficient for ms to be k-free.
inline bool divisibility_free(unsigned k, Multiplicities const& ms)
{
    for (unsigned d = 2; d <= k / 2; ++d) {
        if (k % d == 0)
            continue;
        bool all = true;
        for (std::size_t j = 1; j <= ms.length() && all; ++j)
            all = (j % d == 0) || ms[j] == 0;
        if (all)
            return true;
    }
    return false;
}

/// All achievable subpartition sizes in [0, cap], by bounded-knapsack DP.
inline SumSet subpartition_sums(Multiplicities const& ms, std::size_t cap)
{
    if (cap < 1)
        throw std::invalid_argument("subpartition_sums: cap must be >= 1");
    SumSet sums(cap);
    for (std::size_t j = 1; j <= ms.length(); ++j)
        sums.add_parts(j, ms[j]);
    return sums;
}

/// Which stage of the three-stage test decided a k-freeness query.
enum class FreeTestStage { universal, divisibility, full };

struct FreeTestResult {
    bool k_free;
    FreeTestStage stage;
};

inline FreeTestResult classify_k_free(unsigned k, Multiplicities const& ms)
{
    if (universality_index(ms) >= k)
        return {false, FreeTestStage::universal};
    if (divisibility_free(k, ms))
        return {true, FreeTestStage::divisibility};
    return {!subpartition_sums(ms, k).contains(k), FreeTestStage::full};
}

/// True iff the partition has no subpartition of size k.
inline bool is_k_free(unsigned k, Multiplicities const& ms)
{
    if (k < 1)
        throw std::invalid_argument("is_k_free: k must be >= 1");
    return classify_k_free(k, ms).k_free;
}

inline BigInt factorial(unsigned n)
{
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

/// prod_j j^{m_j} m_j!, the centralizer order of a permutation of this type.
inline BigInt centralizer_size(Multiplicities const& ms)
{
    BigInt z = 1;
    for (std::size_t j = 1; j <= ms.length(); ++j) {
        unsigned const m = ms[j];
        if (m == 0)
            continue;
        BigInt p;
        mpz_ui_pow_ui(p.get_mpz_t(), j, m);
        z *= p * factorial(m);
    }
    return z;
}

} // namespace derange
