#pragma once

// Monte-Carlo estimates of p(inf, k) and i(n, k).
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed
// by the standard. Samples are processed in chunks of `chunk_size`; chunk c
// draws from an engine seeded with std::seed_seq{seed_lo, seed_hi, c}, so
// estimates depend only on (parameters, samples, seed) and not on the
// number of worker threads. Uniform variates are derived from raw engine
// output directly rather than through the implementation-defined standard
// distributions.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "partition.hpp"

namespace derange {

struct Estimate {
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;

    double mean() const noexcept { return samples ? double(hits) / double(samples) : 0.0; }
    double standard_error() const noexcept
    {
        double const p = mean();
        return samples ? std::sqrt(p * (1.0 - p) / double(samples)) : 0.0;
    }
    /// |mean - target| expressed in standard errors.
    double sigmas_from(double target) const noexcept
    {
        double const se = standard_error();
        double const d = std::abs(mean() - target);
        if (se == 0.0)
            return d == 0.0 ? 0.0 : INFINITY;
        return d / se;
    }
};

/// Independent Poisson counts X_1..X_k, X_j of mean 1/j, as multiplicities.
struct PoissonSample {
    std::vector<unsigned> counts;
    std::uint64_t chunk = 0; // chunk whose stream produced it
};

namespace mc {

constexpr std::uint64_t chunk_size = 1u << 16;
constexpr unsigned poisson_cap = 64;

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::uint64_t chunk)
{
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(chunk),
                      std::uint32_t(chunk >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g)
{
    return double(g() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t bound)
{
    std::uint64_t const limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
    for (;;) {
        std::uint64_t const x = g();
        if (x < limit)
            return x % bound;
    }
}

/// Poisson variate of the given mean by CDF inversion.
inline unsigned poisson(std::mt19937_64& g, double mean)
{
    double const u = uniform01(g);
    double pmf = std::exp(-mean);
    double cdf = pmf;
    unsigned x = 0;
    while (u >= cdf) {
        ++x;
        if (x >= poisson_cap)
            throw std::logic_error("poisson: count cap reached");
        pmf *= mean / x;
        cdf += pmf;
    }
    return x;
}

/// Runs `per_chunk(engine, count)` for every chunk on `threads` workers and
/// adds up the hit counts.
template <class PerChunk>
Estimate run_chunks(std::uint64_t samples, std::uint64_t seed, unsigned threads, PerChunk per_chunk)
{
    if (samples < 1)
        throw std::invalid_argument("monte carlo: samples must be >= 1");
    std::uint64_t const chunks = (samples + chunk_size - 1) / chunk_size;
    std::vector<std::uint64_t> hits(chunks, 0);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) {
            auto g = chunk_engine(seed, c);
            std::uint64_t const n = std::min(chunk_size, samples - c * chunk_size);
            hits[c] = per_chunk(g, n, c);
        }
    };
    threads = unsigned(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, chunks)));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }
    Estimate e;
    e.samples = samples;
    for (auto h : hits)
        e.hits += h;
    return e;
}

} // namespace mc

inline PoissonSample draw_poisson_sample(std::mt19937_64& g, unsigned k, std::uint64_t chunk = 0)
{
    PoissonSample s;
    s.chunk = chunk;
    s.counts.resize(k);
    for (unsigned j = 1; j <= k; ++j)
        s.counts[j - 1] = mc::poisson(g, 1.0 / j);
    return s;
}

/// Cycle type of a uniform permutation of n points: walking the points in
/// order, the current cycle closes with probability 1/(points remaining).
inline std::vector<unsigned> draw_cycle_type(std::mt19937_64& g, unsigned n)
{
    std::vector<unsigned> ms(n, 0);
    unsigned len = 0;
    for (unsigned remaining = n; remaining >= 1; --remaining) {
        ++len;
        if (mc::uniform_below(g, remaining) == 0) {
            ++ms[len - 1];
            len = 0;
        }
    }
    return ms;
}

/// Fraction of Poisson partitions (1^{X_1} ... k^{X_k}) that are k-free.
inline Estimate sample_limit_survival(unsigned k, std::uint64_t samples, std::uint64_t seed,
                                      unsigned threads = 1)
{
    if (k < 1)
        throw std::invalid_argument("sample_limit_survival: k must be >= 1");
    return mc::run_chunks(samples, seed, threads,
                          [k](std::mt19937_64& g, std::uint64_t n, std::uint64_t c) {
                              std::uint64_t free = 0;
                              for (std::uint64_t i = 0; i < n; ++i) {
                                  auto const s = draw_poisson_sample(g, k, c);
                                  free += subpartition_sums(Multiplicities(s.counts), k).contains(k) ? 0 : 1;
                              }
                              return free;
                          });
}

/// Fraction of uniform permutations of n points fixing some k-set.
inline Estimate sample_finite_fix(unsigned n, unsigned k, std::uint64_t samples, std::uint64_t seed,
                                  unsigned threads = 1)
{
    if (k < 1 || k > n)
        throw std::invalid_argument("sample_finite_fix: need 1 <= k <= n");
    return mc::run_chunks(samples, seed, threads,
                          [n, k](std::mt19937_64& g, std::uint64_t count, std::uint64_t) {
                              std::uint64_t fixes = 0;
                              for (std::uint64_t i = 0; i < count; ++i) {
                                  auto const ms = draw_cycle_type(g, n);
                                  fixes += subpartition_sums(Multiplicities(ms), k).contains(k) ? 1 : 0;
                              }
                              return fixes;
                          });
}

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Mean number of j-cycles of a uniform permutation of n points.
inline MeanEstimate mean_cycle_count(unsigned n, unsigned j, std::uint64_t samples, std::uint64_t seed)
{
    if (j < 1 || j > n)
        throw std::invalid_argument("mean_cycle_count: need 1 <= j <= n");
    std::uint64_t total = 0, total_sq = 0;
    mc::run_chunks(samples, seed, 1, [&](std::mt19937_64& g, std::uint64_t count, std::uint64_t) {
        for (std::uint64_t i = 0; i < count; ++i) {
            std::uint64_t const x = draw_cycle_type(g, n)[j - 1];
            total += x;
            total_sq += x * x;
        }
        return std::uint64_t(0);
    });
    double const s = double(samples);
    double const mean = double(total) / s;
    double const var = std::max(0.0, double(total_sq) / s - mean * mean);
    return {mean, std::sqrt(var / s)};
}

} // namespace derange
