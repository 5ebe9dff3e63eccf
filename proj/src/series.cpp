#include "lpow/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lpow/errors.hpp"

namespace lpow {

namespace {

// Least common multiple of all denominators.
Integer common_denominator(std::span<const Rational> xs) {
    Integer l = 1;
    for (const auto& x : xs) {
        if (x.get_den() != 1) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    }
    return l;
}

// x * l as an integer; l must be a multiple of x's denominator.
std::vector<Integer> scale_to_integers(std::span<const Rational> xs, const Integer& l) {
    std::vector<Integer> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Integer q = l / xs[i].get_den();
        out[i] = xs[i].get_num() * q;
    }
    return out;
}

std::vector<Rational> divide_all(const std::vector<Integer>& nums, const Integer& den) {
    std::vector<Rational> out(nums.size());
    for (std::size_t i = 0; i < nums.size(); ++i) {
        out[i] = Rational(nums[i], den);
        out[i].canonicalize();
    }
    return out;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) throw ParseError("empty number", 0);

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Integer p, q;
        if (p.set_str(s.substr(0, slash), 10) != 0) throw ParseError("bad numerator '" + s + "'", 0);
        if (q.set_str(s.substr(slash + 1), 10) != 0 || q == 0)
            throw ParseError("bad denominator '" + s + "'", slash + 1);
        Rational r(p, q);
        r.canonicalize();
        return r;
    }

    // Decimal: [sign] digits [. digits] [e|E [sign] digits]
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
    std::string digits;
    long exponent10 = 0;
    bool seen_digit = false;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        digits += s[i++];
        seen_digit = true;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            digits += s[i++];
            --exponent10;
            seen_digit = true;
        }
    }
    if (!seen_digit) throw ParseError("expected a number in '" + s + "'", i);
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        std::size_t start = i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (i == exp_digits) throw ParseError("bad exponent in '" + s + "'", i);
        exponent10 += std::stol(s.substr(start, i - start));
    }
    if (i != s.size()) throw ParseError("unexpected character in '" + s + "'", i);

    Integer mant(digits, 10);
    if (negative) mant = -mant;
    Integer pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent10)));
    Rational r = exponent10 >= 0 ? Rational(mant * pow10) : Rational(mant, pow10);
    r.canonicalize();
    return r;
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw RangeError("non-finite value has no rational form");
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

std::string to_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_str(10);
}

LogMagnitude log_magnitude(const Integer& z) {
    int sign = sgn(z);
    if (sign == 0) return {0, -std::numeric_limits<double>::infinity()};
    long exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return {sign, std::log(std::fabs(mant)) + static_cast<double>(exp2) * std::numbers::ln2};
}

LogMagnitude log_magnitude(const Rational& q) {
    LogMagnitude num = log_magnitude(q.get_num());
    if (num.sign == 0) return num;
    LogMagnitude den = log_magnitude(q.get_den());
    return {num.sign, num.log_abs - den.log_abs};
}

double log_of(const Rational& q) {
    LogMagnitude m = log_magnitude(q);
    if (m.sign < 0) throw RangeError("logarithm of a negative rational");
    return m.log_abs;
}

ExactSeries ExactSeries::truncated(std::size_t degree_cap) const {
    std::vector<Rational> out(degree_cap + 1);
    for (std::size_t j = 0; j <= degree_cap && j < coeffs_.size(); ++j) out[j] = coeffs_[j];
    return ExactSeries(std::move(out));
}

ExactSeries series_mul(const ExactSeries& a, const ExactSeries& b, std::size_t degree_cap) {
    // Convolve integer numerators over common denominators, then reduce
    // each coefficient once; avoids a gcd per multiply-add.
    const std::size_t na = std::min(a.size(), degree_cap + 1);
    const std::size_t nb = std::min(b.size(), degree_cap + 1);
    if (na == 0 || nb == 0) return ExactSeries::zero(degree_cap);

    Integer la = common_denominator(a.view().first(na));
    Integer lb = common_denominator(b.view().first(nb));
    auto ia = scale_to_integers(a.view().first(na), la);
    auto ib = scale_to_integers(b.view().first(nb), lb);

    std::vector<Integer> c(degree_cap + 1);
    for (std::size_t i = 0; i < na; ++i) {
        if (ia[i] == 0) continue;
        const std::size_t jmax = std::min(nb, degree_cap + 1 - i);
        for (std::size_t j = 0; j < jmax; ++j) {
            if (ib[j] == 0) continue;
            mpz_addmul(c[i + j].get_mpz_t(), ia[i].get_mpz_t(), ib[j].get_mpz_t());
        }
    }
    return ExactSeries(divide_all(c, la * lb));
}

ExactSeries series_add(const ExactSeries& a, const ExactSeries& b) {
    std::vector<Rational> out(std::max(a.size(), b.size()));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = a[j] + b[j];
    return ExactSeries(std::move(out));
}

ExactSeries series_scale(const ExactSeries& a, const Rational& c) {
    std::vector<Rational> out(a.coeffs());
    for (auto& x : out) x *= c;
    return ExactSeries(std::move(out));
}

ExactSeries series_derivative(const ExactSeries& a) {
    if (a.size() <= 1) return ExactSeries{Rational(0)};
    std::vector<Rational> out(a.size() - 1);
    for (std::size_t j = 1; j < a.size(); ++j) out[j - 1] = a[j] * static_cast<unsigned long>(j);
    return ExactSeries(std::move(out));
}

ExactSeries series_reciprocal(const ExactSeries& a, std::size_t degree_cap) {
    if (a[0] == 0) throw PreconditionError("series_reciprocal: constant term must be nonzero");
    std::vector<Rational> r(degree_cap + 1);
    const Rational inv0 = 1 / a[0];
    r[0] = inv0;
    for (std::size_t n = 1; n <= degree_cap; ++n) {
        Rational acc = 0;
        for (std::size_t j = 1; j <= n && j < a.size(); ++j) {
            if (a[j] != 0) acc += a[j] * r[n - j];
        }
        r[n] = -acc * inv0;
    }
    return ExactSeries(std::move(r));
}

ExactSeries series_div(const ExactSeries& a, const ExactSeries& b, std::size_t degree_cap) {
    return series_mul(a, series_reciprocal(b, degree_cap), degree_cap);
}

ExactSeries series_log(const ExactSeries& a, std::size_t degree_cap) {
    if (a[0] <= 0) throw PreconditionError("series_log: constant term must be positive");
    if (a[0] != 1) throw PreconditionError("series_log: constant term must be 1 for an exact result");
    // (ln a)' = a'/a, then integrate.
    ExactSeries q = series_div(series_derivative(a.truncated(degree_cap + 1)), a,
                               degree_cap == 0 ? 0 : degree_cap - 1);
    std::vector<Rational> out(degree_cap + 1);
    for (std::size_t j = 1; j <= degree_cap; ++j) out[j] = q[j - 1] / static_cast<unsigned long>(j);
    return ExactSeries(std::move(out));
}

ExactSeries series_exp(const ExactSeries& a, std::size_t degree_cap) {
    if (a[0] != 0) throw PreconditionError("series_exp: constant term must be 0");
    // n b_n = sum_{k=1}^n k a_k b_{n-k}
    std::vector<Rational> b(degree_cap + 1);
    b[0] = 1;
    for (std::size_t n = 1; n <= degree_cap; ++n) {
        Rational acc = 0;
        for (std::size_t k = 1; k <= n && k < a.size(); ++k) {
            if (a[k] != 0) acc += a[k] * b[n - k] * static_cast<unsigned long>(k);
        }
        b[n] = acc / static_cast<unsigned long>(n);
    }
    return ExactSeries(std::move(b));
}

ExactSeries series_compose(const ExactSeries& outer, const ExactSeries& inner,
                           std::size_t degree_cap) {
    if (inner[0] != 0) throw PreconditionError("series_compose: inner constant term must be 0");
    // Horner from the highest usable outer coefficient; terms beyond the
    // cap vanish because inner has valuation >= 1.
    const std::size_t top = std::min(outer.size(), degree_cap + 1);
    ExactSeries acc = ExactSeries::zero(degree_cap);
    ExactSeries in = inner.truncated(degree_cap);
    for (std::size_t j = top; j-- > 0;) {
        acc = series_mul(acc, in, degree_cap);
        acc.at(0) += outer[j];
    }
    return acc;
}

ExactSeries series_pow(const ExactSeries& a, std::uint64_t n, std::size_t degree_cap) {
    ExactSeries result = ExactSeries::zero(degree_cap);
    result.at(0) = 1;
    ExactSeries base = a.truncated(degree_cap);
    while (n > 0) {
        if (n & 1u) result = series_mul(result, base, degree_cap);
        n >>= 1;
        if (n > 0) base = series_mul(base, base, degree_cap);
    }
    return result;
}

ExactSeries series_pow_recurrence(const ExactSeries& a, std::uint64_t n, std::size_t degree_cap) {
    if (a[0] == 0) throw PreconditionError("series_pow_recurrence: constant term must be nonzero");
    if (n == 0) {
        ExactSeries one = ExactSeries::zero(degree_cap);
        one.at(0) = 1;
        return one;
    }

    // a = alpha / L with alpha integral; alpha^n has integer coefficients
    // and satisfies
    //   k alpha_0 c_k = sum_{j=1}^{k} ((n+1) j - k) alpha_j c_{k-j},
    // so every division below is exact.
    const std::size_t len = std::min(a.size(), degree_cap + 1);
    const Integer l = common_denominator(a.view().first(len));
    const auto alpha = scale_to_integers(a.view().first(len), l);

    std::vector<std::size_t> support;
    for (std::size_t j = 1; j < len; ++j)
        if (alpha[j] != 0) support.push_back(j);

    const Integer big_n(std::to_string(n), 10);
    std::vector<Integer> c(degree_cap + 1);
    mpz_pow_ui(c[0].get_mpz_t(), alpha[0].get_mpz_t(), n);

    Integer acc, weight, term;
    for (std::size_t k = 1; k <= degree_cap; ++k) {
        acc = 0;
        for (std::size_t j : support) {
            if (j > k) break;
            if (c[k - j] == 0) continue;
            // weight = (n+1) j - k
            weight = big_n + 1;
            weight *= static_cast<unsigned long>(j);
            weight -= static_cast<unsigned long>(k);
            term = weight * alpha[j];
            mpz_addmul(acc.get_mpz_t(), term.get_mpz_t(), c[k - j].get_mpz_t());
        }
        if (acc == 0) continue;
        Integer divisor = alpha[0] * static_cast<unsigned long>(k);
        mpz_divexact(c[k].get_mpz_t(), acc.get_mpz_t(), divisor.get_mpz_t());
    }

    Integer ln;
    mpz_pow_ui(ln.get_mpz_t(), l.get_mpz_t(), n);
    return ExactSeries(divide_all(c, ln));
}

}  // namespace lpow
