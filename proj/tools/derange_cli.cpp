// derange: command-line front end for the k-set derangement library.
//
// Exit codes: 0 success, 2 usage error, 3 internal invariant violation.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "derange/derange.hpp"

namespace {

using namespace derange;

struct RunConfig {
    unsigned k = 0;
    unsigned k_max = 0;
    unsigned n = 0;
    unsigned n_max = 0;
    unsigned digits = 0;
    std::string which = "i";
    std::string output;
    std::string emit_rows;
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool wide = false;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

unsigned default_threads()
{
    if (char const* env = std::getenv("DERANGE_THREADS")) {
        try {
            unsigned long const v = std::stoul(env);
            if (v >= 1 && v <= 1024)
                return unsigned(v);
        } catch (std::exception const&) {
        }
        throw UsageError("DERANGE_THREADS must be an integer in [1, 1024]");
    }
    return 1;
}

/// stdout or the --output file.
class Output {
public:
    explicit Output(std::string const& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw UsageError("cannot open output file: " + path);
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void check_digits(unsigned d)
{
    if (d < 1 || d > 50)
        throw UsageError("--digits must be in [1, 50]");
}

void check_k(unsigned k)
{
    if (k < 1 || k > max_table_k)
        throw UsageError("--k must be in [1, 63]");
}

int cmd_limit(RunConfig const& c)
{
    check_k(c.k);
    check_digits(c.digits);
    std::unique_ptr<std::ofstream> rows_out;
    if (!c.emit_rows.empty()) {
        rows_out = std::make_unique<std::ofstream>(c.emit_rows, std::ios::binary);
        if (!*rows_out)
            throw UsageError("cannot open row file: " + c.emit_rows);
    }

    LimitComputation lc;
    if (rows_out) {
        SurvivalAccumulator acc(c.k);
        std::string line;
        lc.stats = enumerate_rows_parallel(c.k, c.threads, [&](std::span<unsigned const> ms) {
            acc.add_row(ms);
            line.clear();
            for (std::size_t i = 0; i < ms.size(); ++i) {
                if (i)
                    line += ',';
                line += std::to_string(ms[i]);
            }
            line += '\n';
            *rows_out << line;
        });
        lc.survival = acc.result();
    } else {
        lc = compute_limit(c.k, c.threads);
    }
    auto const s = lc.stats;
    if (s.partials_considered != s.pruned_universal + s.pruned_divisibility + s.full_tests)
        throw std::logic_error("table counters are inconsistent");

    Output out(c.output);
    auto& os = out.os();
    os << "k=" << c.k << '\n'
       << "i_inf=" << evaluate(lc.fix_probability(), c.digits).text << '\n'
       << "p_inf=" << evaluate(lc.survival, c.digits).text << '\n'
       << "rows=" << s.rows_emitted << '\n'
       << "partials_considered=" << s.partials_considered << '\n'
       << "pruned_universal=" << s.pruned_universal << '\n'
       << "pruned_divisibility=" << s.pruned_divisibility << '\n'
       << "full_tests=" << s.full_tests << '\n';
    return 0;
}

int cmd_limit_table(RunConfig const& c)
{
    check_k(c.k_max);
    check_digits(c.digits);
    Output out(c.output);
    auto& os = out.os();
    os << "k,i_inf,rows\n";
    for (unsigned k = 1; k <= c.k_max; ++k) {
        auto const lc = compute_limit(k, c.threads);
        os << k << ',' << evaluate(lc.fix_probability(), c.digits).text << ',' << lc.stats.rows_emitted
           << '\n';
        os.flush();
    }
    return 0;
}

/// Table-style cell: leading zero removed.
std::string short_decimal(std::string s)
{
    if (s.size() > 1 && s[0] == '0' && s[1] == '.')
        s.erase(0, 1);
    return s;
}

int cmd_finite_table(RunConfig const& c)
{
    if (c.n_max < 2 || c.n_max > max_finite_n)
        throw UsageError("--n-max must be in [2, 127]");
    if (c.k_max < 1)
        throw UsageError("--k-max must be >= 1");
    check_digits(c.digits);
    if (c.which != "i" && c.which != "p")
        throw UsageError("--which must be i or p");

    auto const table = finite_table(c.n_max, c.k_max, c.threads);
    Output out(c.output);
    auto& os = out.os();
    auto value = [&](FiniteResult const& r) {
        return rational_decimal(c.which == "i" ? r.fix_probability : r.survival, c.digits).text;
    };
    if (c.wide) {
        unsigned current = 0;
        for (auto const& r : table) {
            if (r.n != current) {
                if (current != 0)
                    os << '\n';
                current = r.n;
                os << r.n;
            }
            os << ' ' << short_decimal(value(r));
        }
        if (current != 0)
            os << '\n';
        return 0;
    }
    os << "n,k,value\n";
    for (auto const& r : table)
        os << r.n << ',' << r.k << ',' << value(r) << '\n';
    return 0;
}

int cmd_exceptions(RunConfig const& c)
{
    if (c.n_max < 4 || c.n_max > max_finite_n)
        throw UsageError("--n-max must be in [4, 127]");
    Output out(c.output);
    auto& os = out.os();
    os << "n,k\n";
    for (auto const& [n, k] : exceptions(c.n_max, c.threads))
        os << n << ',' << k << '\n';
    return 0;
}

int cmd_ratio(RunConfig const& c)
{
    if (c.k_max < 2 || c.k_max > max_table_k)
        throw UsageError("--k-max must be in [2, 63]");
    check_digits(c.digits);
    Output out(c.output);
    auto& os = out.os();
    os << "k,ratio\n";
    for (unsigned k = 2; k <= c.k_max; ++k) {
        auto const lc = compute_limit(k, c.threads);
        os << k << ',' << efg_ratio_of(lc.fix_probability(), k, c.digits).text << '\n';
        os.flush();
    }
    return 0;
}

int cmd_mc(RunConfig const& c)
{
    if (c.samples < 1)
        throw UsageError("--samples must be >= 1");
    Estimate e;
    Output out(c.output);
    auto& os = out.os();
    if (c.n == 0) {
        check_k(c.k);
        e = sample_limit_survival(c.k, c.samples, c.seed, c.threads);
        os << "quantity=p_inf k=" << c.k;
    } else {
        if (c.k < 1 || c.k > c.n)
            throw UsageError("--k must be in [1, n]");
        e = sample_finite_fix(c.n, c.k, c.samples, c.seed, c.threads);
        os << "quantity=i_finite n=" << c.n << " k=" << c.k;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, " samples=%llu hits=%llu estimate=%.6f stderr=%.6f\n",
                  static_cast<unsigned long long>(e.samples), static_cast<unsigned long long>(e.hits),
                  e.mean(), e.standard_error());
    os << buf;
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Derangement probabilities of the symmetric group acting on k-sets"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::optional<unsigned> threads_flag;
    std::optional<unsigned> digits_flag;
    app.add_option("--threads", threads_flag, "Worker threads (default: $DERANGE_THREADS or 1)")
        ->check(CLI::Range(1u, 1024u));

    auto* limit = app.add_subcommand("limit", "i(inf,k), p(inf,k), row count and pruning counters");
    limit->add_option("--k", cfg.k, "Subset size")->required();
    limit->add_option("--digits", digits_flag, "Decimal places (default 8)");
    limit->add_option("--emit-rows", cfg.emit_rows, "Write the k-free rows to this file");
    limit->add_option("--output,-o", cfg.output, "Output file (default stdout)");

    auto* limit_table = app.add_subcommand("limit-table", "CSV of i(inf,k) and rows(k) for k <= k-max");
    limit_table->add_option("--k-max", cfg.k_max, "Largest k")->required();
    limit_table->add_option("--digits", digits_flag, "Decimal places (default 8)");
    limit_table->add_option("--output,-o", cfg.output, "Output file (default stdout)");

    auto* finite = app.add_subcommand("finite-table", "CSV of i(n,k) or p(n,k) for n <= n-max");
    finite->add_option("--n-max", cfg.n_max, "Largest n")->required();
    finite->add_option("--k-max", cfg.k_max, "Largest k")->default_val(max_finite_n);
    finite->add_option("--digits", digits_flag, "Decimal places (default 5)");
    finite->add_option("--which", cfg.which, "i or p")->default_val("i");
    finite->add_flag("--wide", cfg.wide, "Print as a matrix instead of long CSV");
    finite->add_option("--output,-o", cfg.output, "Output file (default stdout)");

    auto* exc = app.add_subcommand("exceptions", "Pairs with 2(k+1) <= n and i(n,k) < i(n,k+1)");
    exc->add_option("--n-max", cfg.n_max, "Largest n")->required();
    exc->add_option("--output,-o", cfg.output, "Output file (default stdout)");

    auto* ratio = app.add_subcommand("ratio", "CSV of i(inf,k) / (k^-delta (log k)^-3/2)");
    ratio->add_option("--k-max", cfg.k_max, "Largest k")->required();
    ratio->add_option("--digits", digits_flag, "Decimal places (default 8)");
    ratio->add_option("--output,-o", cfg.output, "Output file (default stdout)");

    auto* mc = app.add_subcommand("mc", "Monte-Carlo estimate of p(inf,k), or of i(n,k) with --n");
    mc->add_option("--k", cfg.k, "Subset size")->required();
    mc->add_option("--n", cfg.n, "Degree; omit for the limiting survival probability");
    mc->add_option("--samples", cfg.samples, "Number of samples")->required();
    mc->add_option("--seed", cfg.seed, "Random seed")->default_val(1u);
    mc->add_option("--output,-o", cfg.output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        cfg.threads = threads_flag ? *threads_flag : default_threads();
        cfg.digits = digits_flag.value_or(finite->parsed() ? 5u : 8u);
        if (limit->parsed())
            return cmd_limit(cfg);
        if (limit_table->parsed())
            return cmd_limit_table(cfg);
        if (finite->parsed())
            return cmd_finite_table(cfg);
        if (exc->parsed())
            return cmd_exceptions(cfg);
        if (ratio->parsed())
            return cmd_ratio(cfg);
        if (mc->parsed())
            return cmd_mc(cfg);
    } catch (UsageError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (std::invalid_argument const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (std::exception const& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
