#include <catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

#include "derange/evaluate.hpp"
#include "derange/finite.hpp"
#include "support.hpp"

using namespace derange;
namespace ts = testing_support;

TEST_CASE("partition counts match the pentagonal recurrence", "[finite]")
{
    auto const p = ts::partition_numbers(40);
    for (unsigned n : {1u, 4u, 7u, 10u, 23u, 40u}) {
        INFO("n = " << n);
        CHECK(partitions_of(n, [](Multiplicities const&) {}) == p[n]);
    }
    CHECK(p[4] == 5);
    CHECK(p[10] == 42);
    CHECK(p[40] == 37338);
    CHECK_THROWS_AS(partitions_of(0, [](Multiplicities const&) {}), std::invalid_argument);
}

TEST_CASE("partitions come in descending order of part lists", "[finite]")
{
    for (unsigned n : {5u, 9u, 14u}) {
        std::vector<std::vector<unsigned>> seen;
        partitions_of(n, [&](Multiplicities const& ms) {
            std::vector<unsigned> parts;
            for (unsigned j = n; j >= 1; --j)
                parts.insert(parts.end(), ms[j], j);
            seen.push_back(parts);
        });
        CHECK(seen == ts::part_lists(n));
    }
}

TEST_CASE("small finite values", "[finite]")
{
    CHECK(finite_fix_probability(2, 1).fix_probability == mpq_class(1, 2));
    CHECK(finite_fix_probability(4, 2).fix_probability == mpq_class(5, 12));
    CHECK(finite_fix_probability(4, 2).survival == mpq_class(7, 12));
    CHECK(rational_decimal(finite_fix_probability(6, 3).fix_probability, 5).text == "0.36250");
    CHECK(finite_fix_probability(5, 5).fix_probability == 1);
    CHECK_THROWS_AS(finite_fix_probability(4, 5), std::invalid_argument);
    CHECK_THROWS_AS(finite_fix_probability(4, 0), std::invalid_argument);
}

TEST_CASE("i(n, k) equals brute-force permutation counts for n <= 8", "[finite][oracle]")
{
    for (unsigned n = 1; n <= 8; ++n)
        for (unsigned k = 1; k <= n; ++k) {
            mpq_class expected(ts::brute_force_fixing_permutations(n, k), factorial(n));
            expected.canonicalize();
            INFO("n = " << n << ", k = " << k);
            CHECK(finite_fix_probability(n, k).fix_probability == expected);
        }
}

TEST_CASE("shared pass agrees with per-pair sums", "[finite]")
{
    for (unsigned n : {1u, 6u, 13u, 22u}) {
        auto const row = finite_row(n, n);
        REQUIRE(row.size() == n);
        for (auto const& r : row) {
            INFO("n = " << n << ", k = " << r.k);
            CHECK(r.fix_probability == finite_fix_probability(n, r.k).fix_probability);
            CHECK(r.fix_probability + r.survival == 1);
        }
    }
}

TEST_CASE("i(n, k) = i(n, n - k)", "[finite]")
{
    for (unsigned n = 2; n <= 20; ++n) {
        auto const row = finite_row(n, n);
        for (unsigned k = 1; k < n; ++k)
            REQUIRE(row[k - 1].fix_probability == row[n - k - 1].fix_probability);
    }
}

TEST_CASE("denominator divides n!", "[finite]")
{
    for (unsigned n = 2; n <= 25; ++n)
        for (auto const& r : finite_row(n, n / 2))
            REQUIRE(mpz_divisible_p(factorial(n).get_mpz_t(), r.fix_probability.get_den_mpz_t()));
}

TEST_CASE("columns settle as n grows", "[finite]")
{
    // i(n, k) for fixed small k moves by less than 1e-3 across n in [40, 45]
    for (unsigned k = 1; k <= 4; ++k) {
        mpq_class lo = 2, hi = -1;
        for (unsigned n = 40; n <= 45; ++n) {
            auto const v = finite_fix_probability(n, k).fix_probability;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        INFO("k = " << k);
        CHECK(hi - lo < mpq_class(1, 1000));
    }
}

TEST_CASE("finite_table layout", "[finite]")
{
    auto const t = finite_table(5, 2);
    std::vector<std::pair<unsigned, unsigned>> cells;
    for (auto const& r : t)
        cells.emplace_back(r.n, r.k);
    std::vector<std::pair<unsigned, unsigned>> const expected{{2, 1}, {3, 1}, {4, 1}, {4, 2}, {5, 1}, {5, 2}};
    CHECK(cells == expected);
    CHECK(t[3].fix_probability == mpq_class(5, 12));
    CHECK_THROWS_AS(finite_table(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(finite_table(128, 1), std::invalid_argument);
}

TEST_CASE("finite table matches the 5-place reference for n <= 30", "[finite]")
{
    auto const ref_i = ts::load_finite_reference("i");
    auto const ref_p = ts::load_finite_reference("p");
    for (auto const& r : finite_table(30, 15, 2)) {
        INFO("n = " << r.n << ", k = " << r.k);
        CHECK(rational_decimal(r.fix_probability, 5).text == ref_i.at({r.n, r.k}));
        CHECK(rational_decimal(r.survival, 5).text == ref_p.at({r.n, r.k}));
    }
}

TEST_CASE("exceptional pairs", "[finite]")
{
    using Set = std::set<std::pair<unsigned, unsigned>>;
    CHECK(exceptions(29).empty());
    CHECK(exceptions(36) == Set{{30, 9}, {36, 11}});
    Set upto48;
    for (auto const& e : ts::exception_reference())
        if (e.first <= 48)
            upto48.insert(e);
    CHECK(exceptions(48, 2) == upto48);
    CHECK_THROWS_AS(exceptions(3), std::invalid_argument);
    CHECK_THROWS_AS(exceptions(128), std::invalid_argument);
}

TEST_CASE("counter rejects n outside [1, 127]", "[finite]")
{
    CHECK_THROWS_AS(FiniteCounter(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(FiniteCounter(128, 1), std::invalid_argument);
}
