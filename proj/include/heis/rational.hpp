#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace heis {

using BigInt = mpz_class;

inline BigInt big_pow(long base, unsigned long exp)
{
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base < 0 ? -base : base), exp);
    if (base < 0 && (exp & 1U))
        r = -r;
    return r;
}

inline BigInt binomial(unsigned long n, unsigned long k)
{
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

// Reduced fraction with positive denominator; zero is 0/1.
class Rational
{
public:
    Rational() = default;
    Rational(long v) : v_(v) {}
    Rational(const BigInt &v) : v_(v) {}
    Rational(const BigInt &num, const BigInt &den)
    {
        if (den == 0)
            throw std::domain_error("Rational: zero denominator");
        v_ = mpq_class(num, den);
        v_.canonicalize();
    }
    Rational(long num, long den) : Rational(BigInt(num), BigInt(den)) {}

    static Rational from_mpq(mpq_class q)
    {
        Rational r;
        r.v_ = std::move(q);
        r.v_.canonicalize();
        return r;
    }

    // Accepts "n" or "n/d".
    static Rational parse(std::string_view s)
    {
        std::string str(s);
        for (char &c : str)
            if (c == ' ')
                throw std::invalid_argument("Rational: bad literal '" + std::string(s) + "'");
        auto slash = str.find('/');
        try {
            if (slash == std::string::npos)
                return Rational(BigInt(str));
            return Rational(BigInt(str.substr(0, slash)), BigInt(str.substr(slash + 1)));
        } catch (const std::invalid_argument &) {
            throw std::invalid_argument("Rational: bad literal '" + std::string(s) + "'");
        }
    }

    BigInt num() const { return v_.get_num(); }
    BigInt den() const { return v_.get_den(); }
    const mpq_class &raw() const { return v_; }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    // Always "num/den", e.g. "-3/2", "7/1".
    std::string to_string() const { return num().get_str() + "/" + den().get_str(); }

    Rational operator-() const { return from_mpq(-v_); }
    Rational &operator+=(const Rational &o) { v_ += o.v_; return *this; }
    Rational &operator-=(const Rational &o) { v_ -= o.v_; return *this; }
    Rational &operator*=(const Rational &o) { v_ *= o.v_; return *this; }
    Rational &operator/=(const Rational &o)
    {
        if (o.is_zero())
            throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational &b) { return a += b; }
    friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

    friend bool operator==(const Rational &a, const Rational &b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rational &a, const Rational &b)
    {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    Rational inverse() const { return Rational(1) / *this; }

    Rational pow(long e) const
    {
        if (e < 0)
            return inverse().pow(-e);
        mpz_class n, d;
        mpz_pow_ui(n.get_mpz_t(), v_.get_num_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(d.get_mpz_t(), v_.get_den_mpz_t(), static_cast<unsigned long>(e));
        return Rational(n, d);
    }

private:
    mpq_class v_{0};
};

// p-adic valuation; the zero element has infinite valuation.
struct Valuation
{
    std::optional<long> value; // empty means +infinity

    static Valuation infinity() { return {}; }
    bool is_infinite() const { return !value.has_value(); }
    std::string to_string() const { return value ? std::to_string(*value) : "inf"; }

    // Comparisons against finite thresholds: +inf is larger than everything.
    bool at_least(long t) const { return !value || *value >= t; }
    friend bool operator==(const Valuation &, const Valuation &) = default;
};

inline long ordp_int(const BigInt &x, long p)
{
    if (x == 0)
        throw std::domain_error("ordp_int: zero");
    BigInt t = abs(x);
    return static_cast<long>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), BigInt(p).get_mpz_t()));
}

inline Valuation ordp(const Rational &x, long p)
{
    if (x.is_zero())
        return Valuation::infinity();
    return {ordp_int(x.num(), p) - ordp_int(x.den(), p)};
}

enum class Congruence { congruent, not_congruent, not_p_integral };

inline const char *to_string(Congruence c)
{
    switch (c) {
    case Congruence::congruent: return "congruent";
    case Congruence::not_congruent: return "not-congruent";
    case Congruence::not_p_integral: return "not-p-integral";
    }
    return "?";
}

// x ≡ y (mod p) in Z_(p): ord_p(x - y) >= 1, both operands p-integral.
inline Congruence congruent_mod_p(const Rational &x, const Rational &y, long p)
{
    if (!ordp(x, p).at_least(0) || !ordp(y, p).at_least(0))
        return Congruence::not_p_integral;
    return ordp(x - y, p).at_least(1) ? Congruence::congruent : Congruence::not_congruent;
}

} // namespace heis
