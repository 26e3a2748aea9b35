#pragma once

// Reference values and brute-force oracles shared by the test suites.
// Nothing here calls into the library's fast paths.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace testing_support {

/// Reference i(inf, k) (8 places) and rows(k) for k <= 30.
struct LimitReference {
    unsigned k;
    char const* fix_probability;
    std::uint64_t rows;
};

inline constexpr LimitReference limit_reference[] = {
    {1, "0.63212056", 1},         {2, "0.55373968", 2},         {3, "0.49658324", 4},
    {4, "0.46955773", 8},         {5, "0.44145770", 15},        {6, "0.42505870", 29},
    {7, "0.40848113", 53},        {8, "0.39727771", 93},        {9, "0.38516443", 187},
    {10, "0.37687192", 305},      {11, "0.36773064", 561},      {12, "0.36119415", 916},
    {13, "0.35396068", 2067},     {14, "0.34855007", 2782},     {15, "0.34256331", 5670},
    {16, "0.33807249", 8420},     {17, "0.33297333", 19553},    {18, "0.32907588", 23586},
    {19, "0.32472908", 61470},    {20, "0.32132422", 71413},    {21, "0.31750065", 193303},
    {22, "0.31449862", 216928},   {23, "0.31110428", 508502},   {24, "0.30842280", 532542},
    {25, "0.30538904", 2235240},  {26, "0.30295361", 1817364},  {27, "0.30021508", 5143197},
    {28, "0.29801340", 4961040},  {29, "0.29550915", 17517544}, {30, "0.29348611", 12022223},
};

inline LimitReference const& limit_ref(unsigned k)
{
    return limit_reference[k - 1];
}

/// Reference exceptional pairs (n, k), n <= 70.
inline std::vector<std::pair<unsigned, unsigned>> const& exception_reference()
{
    static std::vector<std::pair<unsigned, unsigned>> const v{
        {30, 9},  {36, 11}, {39, 12}, {42, 13}, {45, 14}, {47, 15}, {48, 15},
        {51, 16}, {53, 17}, {54, 17}, {57, 18}, {59, 19}, {60, 19}, {63, 20},
        {64, 21}, {65, 21}, {66, 21}, {68, 22}, {69, 22}, {70, 23}};
    return v;
}

/// Reference 5-place table, keyed by (n, k). `which` is "i" or "p".
inline std::map<std::pair<unsigned, unsigned>, std::string> load_finite_reference(std::string const& which)
{
    std::string const path = std::string(DERANGE_TEST_DATA) + "/reference_" + which + "_nk.csv";
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::map<std::pair<unsigned, unsigned>, std::string> out;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string n, k, v;
        std::getline(ss, n, ',');
        std::getline(ss, k, ',');
        std::getline(ss, v, ',');
        out[{unsigned(std::stoul(n)), unsigned(std::stoul(k))}] = v;
    }
    return out;
}

/// Partition numbers p(0..n) from Euler's pentagonal recurrence.
inline std::vector<std::uint64_t> partition_numbers(unsigned n)
{
    std::vector<std::uint64_t> p(n + 1, 0);
    p[0] = 1;
    for (unsigned m = 1; m <= n; ++m) {
        std::int64_t s = 0;
        for (int i = 1;; ++i) {
            int const g1 = i * (3 * i - 1) / 2, g2 = i * (3 * i + 1) / 2;
            if (g1 > int(m))
                break;
            std::int64_t const sign = (i % 2) ? 1 : -1;
            s += sign * std::int64_t(p[m - g1]);
            if (g2 <= int(m))
                s += sign * std::int64_t(p[m - g2]);
        }
        p[m] = std::uint64_t(s);
    }
    return p;
}

/// All partitions of n as non-increasing part lists.
inline void part_lists_rec(unsigned remaining, unsigned max_part, std::vector<unsigned>& cur,
                           std::vector<std::vector<unsigned>>& out)
{
    if (remaining == 0) {
        out.push_back(cur);
        return;
    }
    for (unsigned p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        part_lists_rec(remaining - p, p, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<unsigned>> part_lists(unsigned n)
{
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> cur;
    part_lists_rec(n, n, cur, out);
    return out;
}

inline std::vector<unsigned> to_multiplicities(std::vector<unsigned> const& parts, unsigned length)
{
    std::vector<unsigned> ms(length, 0);
    for (unsigned p : parts)
        ++ms[p - 1];
    return ms;
}

/// Sizes of all sub-multisets, by enumerating every choice 0 <= a_j <= m_j.
inline std::set<std::uint64_t> brute_force_subsums(std::vector<unsigned> const& ms)
{
    std::set<std::uint64_t> sums;
    std::vector<unsigned> a(ms.size(), 0);
    for (;;) {
        std::uint64_t s = 0;
        for (std::size_t j = 0; j < ms.size(); ++j)
            s += (j + 1) * std::uint64_t(a[j]);
        sums.insert(s);
        std::size_t j = 0;
        while (j < ms.size() && a[j] == ms[j])
            a[j++] = 0;
        if (j == ms.size())
            break;
        ++a[j];
    }
    return sums;
}

/// Number of permutations of {0..n-1} mapping some k-subset onto itself,
/// by listing all n! permutations and all k-subsets.
inline std::uint64_t brute_force_fixing_permutations(unsigned n, unsigned k)
{
    std::vector<unsigned> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    std::vector<std::uint32_t> subsets;
    for (std::uint32_t s = 0; s < (1u << n); ++s)
        if (unsigned(__builtin_popcount(s)) == k)
            subsets.push_back(s);
    std::uint64_t count = 0;
    do {
        for (std::uint32_t s : subsets) {
            std::uint32_t image = 0;
            for (unsigned i = 0; i < n; ++i)
                if (s & (1u << i))
                    image |= 1u << perm[i];
            if (image == s) {
                ++count;
                break;
            }
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

/// Cycle type of a permutation as multiplicities of length n.
inline std::vector<unsigned> cycle_type(std::vector<unsigned> const& perm)
{
    unsigned const n = unsigned(perm.size());
    std::vector<bool> seen(n, false);
    std::vector<unsigned> ms(n, 0);
    for (unsigned i = 0; i < n; ++i) {
        if (seen[i])
            continue;
        unsigned len = 0;
        for (unsigned x = i; !seen[x]; x = perm[x]) {
            seen[x] = true;
            ++len;
        }
        ++ms[len - 1];
    }
    return ms;
}

/// Round-half-even of q to d places as a "0.xxx" string, independent of
/// the library's formatter.
inline std::string round_rational(mpq_class const& q, unsigned d)
{
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, d);
    mpq_class const x = q * scale;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    mpq_class const frac = x - fl;
    if (frac > mpq_class(1, 2) || (frac == mpq_class(1, 2) && mpz_odd_p(fl.get_mpz_t())))
        fl += 1;
    bool const negative = fl < 0;
    std::string s = mpz_class(abs(fl)).get_str();
    if (s.size() <= d)
        s.insert(0, d + 1 - s.size(), '0');
    s.insert(s.size() - d, ".");
    return negative ? "-" + s : s;
}

/// Parses "0.12345" into an exact rational.
inline mpq_class parse_decimal(std::string const& s)
{
    auto const dot = s.find('.');
    std::string const digits = s.substr(0, dot) + (dot == std::string::npos ? "" : s.substr(dot + 1));
    unsigned const places = dot == std::string::npos ? 0 : unsigned(s.size() - dot - 1);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, places);
    mpq_class q(mpz_class(digits, 10), scale);
    q.canonicalize();
    return q;
}

} // namespace testing_support
