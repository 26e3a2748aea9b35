#include <catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "derange/table.hpp"
#include "support.hpp"

using namespace derange;
namespace ts = testing_support;

namespace {

using RowList = std::vector<std::vector<unsigned>>;

RowList collect(unsigned k, TableStats* stats = nullptr)
{
    RowList rows;
    auto s = enumerate_rows(k, [&](std::span<unsigned const> ms) { rows.emplace_back(ms.begin(), ms.end()); });
    if (stats)
        *stats = s;
    return rows;
}

/// Every vector in the box m_j <= (k-1)/j with no sub-multiset summing to k,
/// greatest first.
RowList brute_force_rows(unsigned k)
{
    RowList out;
    std::vector<unsigned> a(k - 1, 0);
    for (;;) {
        if (ts::brute_force_subsums(a).count(k) == 0)
            out.push_back(a);
        std::size_t j = 0;
        while (j < a.size() && a[j] == (k - 1) / (j + 1))
            a[j++] = 0;
        if (j == a.size())
            break;
        ++a[j];
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

} // namespace

TEST_CASE("k = 4 table", "[table]")
{
    RowList const expected{{3, 0, 0}, {2, 0, 0}, {1, 1, 0}, {1, 0, 0},
                           {0, 1, 1}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
    CHECK(collect(4) == expected);
}

TEST_CASE("k = 1 has the single empty row", "[table]")
{
    auto const rows = collect(1);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].empty());
}

TEST_CASE("row counts match the reference for k <= 20", "[table]")
{
    for (unsigned k = 1; k <= 20; ++k) {
        INFO("k = " << k);
        CHECK(rows_count(k) == ts::limit_ref(k).rows);
    }
}

TEST_CASE("table equals brute-force filtering of the box for k <= 11", "[table][oracle]")
{
    for (unsigned k = 2; k <= 11; ++k) {
        INFO("k = " << k);
        CHECK(collect(k) == brute_force_rows(k));
    }
}

TEST_CASE("rows are strictly decreasing and k-free", "[table]")
{
    for (unsigned k = 2; k <= 16; ++k) {
        auto const rows = collect(k);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            REQUIRE(rows[i].size() == k - 1);
            REQUIRE(is_k_free(k, Multiplicities(rows[i])));
            for (unsigned j = 1; j < k; ++j)
                REQUIRE(rows[i][j - 1] <= (k - 1) / j);
            if (i > 0)
                REQUIRE(rows[i - 1] > rows[i]);
        }
    }
}

TEST_CASE("enumeration is deterministic", "[table]")
{
    TableStats a, b;
    auto const r1 = collect(14, &a);
    auto const r2 = collect(14, &b);
    CHECK(r1 == r2);
    CHECK(a == b);
}

TEST_CASE("every considered partial row is counted by exactly one stage", "[table]")
{
    for (unsigned k = 1; k <= 20; ++k) {
        TableStats s;
        collect(k, &s);
        INFO("k = " << k);
        CHECK(s.partials_considered == s.pruned_universal + s.pruned_divisibility + s.full_tests);
        CHECK(s.rows_emitted == ts::limit_ref(k).rows);
    }
}

TEST_CASE("parallel enumeration matches the serial order and counters", "[table]")
{
    for (unsigned k : {3u, 7u, 13u, 17u}) {
        TableStats serial;
        auto const expected = collect(k, &serial);
        for (unsigned threads : {1u, 2u, 4u}) {
            RowList rows;
            auto const s = enumerate_rows_parallel(
                k, threads, [&](std::span<unsigned const> ms) { rows.emplace_back(ms.begin(), ms.end()); });
            INFO("k = " << k << ", threads = " << threads);
            CHECK(rows == expected);
            CHECK(s == serial);
        }
    }
}

TEST_CASE("subtrees from prefixes partition the table", "[table]")
{
    unsigned const k = 12;
    auto const expected = collect(k);
    TableEnumerator driver(k);
    RowList rows;
    for (auto const& prefix : driver.prefixes(2)) {
        TableEnumerator e(k);
        e.run_from(prefix, [&](std::span<unsigned const> ms) { rows.emplace_back(ms.begin(), ms.end()); });
    }
    CHECK(rows == expected);
}

TEST_CASE("k outside [1, 63] is rejected", "[table]")
{
    CHECK_THROWS_AS(TableEnumerator(0), std::invalid_argument);
    CHECK_THROWS_AS(TableEnumerator(64), std::invalid_argument);
    CHECK_NOTHROW(TableEnumerator(63));
}
