#pragma once

// Certified decimal evaluation of exponential polynomials on top of MPFR.
//
// Every evaluation computes an approximation together with a rigorous
// absolute error bound and retries at higher precision until every value
// inside the error interval rounds to the same D-place decimal. The
// result is therefore the correctly rounded decimal of the exact value.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "exp_poly.hpp"

namespace derange {

/// RAII holder for an mpfr_t.
class MpFloat {
public:
    explicit MpFloat(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    MpFloat(MpFloat const&) = delete;
    MpFloat& operator=(MpFloat const&) = delete;
    MpFloat(MpFloat&& o) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    ~MpFloat() { mpfr_clear(v_); }

    mpfr_ptr get() noexcept { return v_; }
    mpfr_srcptr get() const noexcept { return v_; }

private:
    mpfr_t v_;
};

/// A decimal string with `digits` places and absolute error < 10^-digits.
struct HighPrecisionDecimal {
    unsigned digits = 0;
    std::string text;

    friend bool operator==(HighPrecisionDecimal const&, HighPrecisionDecimal const&) = default;
};

namespace detail {

inline BigInt pow10(unsigned d)
{
    BigInt p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, d);
    return p;
}

/// Formats N * 10^-digits.
inline std::string format_scaled(BigInt const& scaled, unsigned digits)
{
    bool const negative = scaled < 0;
    std::string s = BigInt(abs(scaled)).get_str();
    if (s.size() <= digits)
        s.insert(0, digits + 1 - s.size(), '0');
    if (digits > 0)
        s.insert(s.size() - digits, ".");
    return negative ? "-" + s : s;
}

inline unsigned bit_length(BigRational const& q)
{
    BigInt const c = (abs(q.get_num()) + q.get_den() - 1) / q.get_den();
    return unsigned(mpz_sizeinbase(c.get_mpz_t(), 2));
}

/// Approximation of some exact real with |approx - exact| <= error.
struct Enclosure {
    MpFloat value;
    MpFloat error;
};

/// Rounds the enclosed value to `digits` places, or reports failure when the
/// enclosure straddles a rounding boundary.
inline bool round_enclosure(Enclosure const& e, unsigned digits, BigInt& out)
{
    mpfr_prec_t const prec = mpfr_get_prec(e.value.get());
    BigInt const scale = pow10(digits);

    MpFloat y(prec);
    mpfr_mul_z(y.get(), e.value.get(), scale.get_mpz_t(), MPFR_RNDN);

    MpFloat ey(prec), slack(prec);
    mpfr_mul_z(ey.get(), e.error.get(), scale.get_mpz_t(), MPFR_RNDU);
    mpfr_abs(slack.get(), y.get(), MPFR_RNDU);
    mpfr_mul_2si(slack.get(), slack.get(), 1 - prec, MPFR_RNDU);
    mpfr_add(ey.get(), ey.get(), slack.get(), MPFR_RNDU);

    MpFloat lo(prec), hi(prec);
    mpfr_sub(lo.get(), y.get(), ey.get(), MPFR_RNDD);
    mpfr_add(hi.get(), y.get(), ey.get(), MPFR_RNDU);
    mpfr_rint(lo.get(), lo.get(), MPFR_RNDN);
    mpfr_rint(hi.get(), hi.get(), MPFR_RNDN);
    if (!mpfr_equal_p(lo.get(), hi.get()))
        return false;
    mpfr_get_z(out.get_mpz_t(), lo.get(), MPFR_RNDN);
    return true;
}

constexpr mpfr_prec_t max_working_precision = mpfr_prec_t(1) << 22;

/// Ziv loop: refine the enclosure until it rounds unambiguously.
inline HighPrecisionDecimal certified_round(std::function<Enclosure(mpfr_prec_t)> const& enclose,
                                            mpfr_prec_t prec, unsigned digits)
{
    for (; prec <= max_working_precision; prec += prec / 2) {
        Enclosure const e = enclose(prec);
        BigInt scaled;
        if (round_enclosure(e, digits, scaled))
            return {digits, format_scaled(scaled, digits)};
    }
    throw std::runtime_error("certified_round: precision limit exceeded");
}

/// Round-half-to-even of an exact rational to `digits` places.
inline BigInt round_rational_scaled(BigRational const& q, unsigned digits)
{
    BigRational const x = q * BigRational(pow10(digits));
    BigInt fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    BigRational const frac = x - BigRational(fl);
    BigRational const half(1, 2);
    if (frac > half || (frac == half && mpz_odd_p(fl.get_mpz_t())))
        fl += 1;
    return fl;
}

/// Terms grouped by exact exponent value. Distinct exponent sets may share
/// the same value (1/2 = 1/3 + 1/6), so grouping is needed before
/// transcendence guarantees apply.
inline std::map<BigRational, BigRational> group_by_exponent(ExpPoly const& p)
{
    std::map<BigRational, BigRational> g;
    for (auto const& [s, c] : p.terms()) {
        auto& slot = g[exponent_value(s)];
        slot += c;
    }
    std::erase_if(g, [](auto const& kv) { return kv.second == 0; });
    return g;
}

inline Enclosure enclose_sum(std::map<BigRational, BigRational> const& grouped, mpfr_prec_t prec)
{
    Enclosure e{MpFloat(prec), MpFloat(prec)};
    MpFloat c(prec), t(prec);
    BigRational abs_sum = 0;
    for (auto const& [q, coeff] : grouped) {
        abs_sum += abs(coeff);
        mpfr_set_q(t.get(), q.get_mpq_t(), MPFR_RNDN);
        mpfr_neg(t.get(), t.get(), MPFR_RNDN);
        mpfr_exp(t.get(), t.get(), MPFR_RNDN);
        mpfr_set_q(c.get(), coeff.get_mpq_t(), MPFR_RNDN);
        mpfr_mul(t.get(), t.get(), c.get(), MPFR_RNDN);
        mpfr_add(e.value.get(), e.value.get(), t.get(), MPFR_RNDN);
    }
    // Each term carries relative error below 9 ulps (exponents are below 5,
    // so rounding q perturbs exp(-q) by at most 5 ulps); each addition adds
    // at most one ulp of the running |sum| <= sum |c|.
    mpfr_set_q(e.error.get(), abs_sum.get_mpq_t(), MPFR_RNDU);
    mpfr_mul_ui(e.error.get(), e.error.get(), grouped.size() + 16, MPFR_RNDU);
    mpfr_mul_2si(e.error.get(), e.error.get(), -prec, MPFR_RNDU);
    return e;
}

inline mpfr_prec_t initial_precision(unsigned digits, BigRational const& magnitude, std::size_t terms)
{
    auto const digit_bits = mpfr_prec_t(std::ceil(digits * 3.3219280948873623));
    auto const term_bits = mpfr_prec_t(std::bit_width(terms + 16));
    return digit_bits + bit_length(magnitude) + term_bits + 40;
}

} // namespace detail

/// Decimal value of p to `digits` places, correctly rounded.
inline HighPrecisionDecimal evaluate(ExpPoly const& p, unsigned digits)
{
    if (digits < 1)
        throw std::invalid_argument("evaluate: digits must be >= 1");
    auto const grouped = detail::group_by_exponent(p);

    bool rational = true;
    for (auto const& [q, c] : grouped)
        rational = rational && q == 0;
    if (rational) {
        BigRational const v = grouped.empty() ? BigRational(0) : grouped.begin()->second;
        return {digits, detail::format_scaled(detail::round_rational_scaled(v, digits), digits)};
    }

    BigRational magnitude = 0;
    for (auto const& [q, c] : grouped)
        magnitude += abs(c);
    return detail::certified_round(
        [&](mpfr_prec_t prec) { return detail::enclose_sum(grouped, prec); },
        detail::initial_precision(digits, magnitude, grouped.size()), digits);
}

/// Sign of the exact value of p (-1, 0, +1).
inline int certified_sign(ExpPoly const& p)
{
    auto const grouped = detail::group_by_exponent(p);
    if (grouped.empty())
        return 0;
    if (grouped.size() == 1 && grouped.begin()->first == 0)
        return sgn(grouped.begin()->second);
    // Otherwise the value is a non-trivial combination of exponentials at
    // distinct rational points and cannot vanish.
    for (mpfr_prec_t prec = 128; prec <= detail::max_working_precision; prec *= 2) {
        auto const e = detail::enclose_sum(grouped, prec);
        MpFloat mag(prec);
        mpfr_abs(mag.get(), e.value.get(), MPFR_RNDD);
        if (mpfr_greater_p(mag.get(), e.error.get()))
            return mpfr_sgn(e.value.get()) > 0 ? 1 : -1;
    }
    throw std::runtime_error("certified_sign: precision limit exceeded");
}

/// Exact rational to `digits` places, round half to even.
inline HighPrecisionDecimal rational_decimal(BigRational const& q, unsigned digits)
{
    return {digits, detail::format_scaled(detail::round_rational_scaled(q, digits), digits)};
}

namespace detail {

/// delta = 1 - (1 + log log 2) / log 2 with absolute error below 2^(4 - prec).
inline MpFloat efg_delta_approx(mpfr_prec_t prec)
{
    MpFloat l2(prec), ll2(prec), d(prec);
    mpfr_const_log2(l2.get(), MPFR_RNDN);
    mpfr_log(ll2.get(), l2.get(), MPFR_RNDN);
    mpfr_add_ui(ll2.get(), ll2.get(), 1, MPFR_RNDN);
    mpfr_div(d.get(), ll2.get(), l2.get(), MPFR_RNDN);
    mpfr_ui_sub(d.get(), 1, d.get(), MPFR_RNDN);
    return d;
}

} // namespace detail

/// The exponent delta from the Eberhard-Ford-Green bounds.
inline HighPrecisionDecimal efg_delta(unsigned digits)
{
    auto enclose = [](mpfr_prec_t prec) {
        detail::Enclosure e{detail::efg_delta_approx(prec), MpFloat(prec)};
        mpfr_set_ui_2exp(e.error.get(), 1, 4 - prec, MPFR_RNDU);
        return e;
    };
    return detail::certified_round(enclose, mpfr_prec_t(digits * 3.33) + 64, digits);
}

/// fix_probability / (k^-delta (log k)^-3/2) for the exact value fix_probability.
inline HighPrecisionDecimal efg_ratio_of(ExpPoly const& fix_probability, unsigned k, unsigned digits)
{
    if (k < 2)
        throw std::invalid_argument("efg_ratio: k must be >= 2");
    if (k > 1000000)
        throw std::invalid_argument("efg_ratio: k out of range");
    auto const grouped = detail::group_by_exponent(fix_probability);
    BigRational magnitude = 0;
    for (auto const& [q, c] : grouped)
        magnitude += abs(c);

    auto enclose = [&](mpfr_prec_t prec) {
        auto inner = detail::enclose_sum(grouped, prec);
        MpFloat delta = detail::efg_delta_approx(prec);
        MpFloat lk(prec), f(prec), t(prec);
        mpfr_set_ui(lk.get(), k, MPFR_RNDN);
        mpfr_log(lk.get(), lk.get(), MPFR_RNDN);
        mpfr_mul(t.get(), delta.get(), lk.get(), MPFR_RNDN);
        mpfr_exp(f.get(), t.get(), MPFR_RNDN);
        mpfr_sqrt(t.get(), lk.get(), MPFR_RNDN);
        mpfr_mul(t.get(), t.get(), lk.get(), MPFR_RNDN);
        mpfr_mul(f.get(), f.get(), t.get(), MPFR_RNDN);
        // f = k^delta (log k)^{3/2}, relative error below 2^(8 - prec) + log k * 2^(4 - prec)

        detail::Enclosure e{MpFloat(prec), MpFloat(prec)};
        mpfr_mul(e.value.get(), inner.value.get(), f.get(), MPFR_RNDN);

        MpFloat rel(prec), a(prec), b(prec);
        mpfr_set_ui(rel.get(), 256 + 16 * (std::bit_width(k) + 1), MPFR_RNDU);
        mpfr_mul_2si(rel.get(), rel.get(), -prec, MPFR_RNDU);
        mpfr_add_ui(a.get(), rel.get(), 1, MPFR_RNDU);
        mpfr_abs(b.get(), f.get(), MPFR_RNDU);
        mpfr_mul(a.get(), a.get(), b.get(), MPFR_RNDU);
        mpfr_mul(a.get(), a.get(), inner.error.get(), MPFR_RNDU); // propagated sum error
        mpfr_abs(b.get(), e.value.get(), MPFR_RNDU);
        mpfr_mul_ui(rel.get(), rel.get(), 2, MPFR_RNDU);
        mpfr_mul(b.get(), b.get(), rel.get(), MPFR_RNDU); // factor error plus final rounding
        mpfr_add(e.error.get(), a.get(), b.get(), MPFR_RNDU);
        return e;
    };
    return detail::certified_round(
        enclose, detail::initial_precision(digits, magnitude, grouped.size()) + 16, digits);
}

} // namespace derange
